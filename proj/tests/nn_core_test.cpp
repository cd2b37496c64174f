#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "dlau/nn_core.hpp"
#include "dlau/synthetic.hpp"
#include "oracles.hpp"

using namespace dlau;

namespace {

oracle::Grid to_grid(const MatrixD& m) {
  oracle::Grid g(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
  }
  return g;
}

MatrixD unit_interval(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  MatrixD m = gen_synthetic(rows, cols, seed).cast<double>();
  for (auto& v : m.values()) v += 0.5;
  return m;
}

std::vector<MatrixD> random_weights(const std::vector<std::size_t>& sizes, std::uint64_t seed) {
  std::vector<MatrixD> w;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    MatrixD m = gen_synthetic(sizes[l], sizes[l + 1], seed * 31 + l).cast<double>();
    for (auto& v : m.values()) v *= 4.0;  // [-2, 2) keeps the sigmoids off their flat tails
    w.push_back(std::move(m));
  }
  return w;
}

// |a-b| / max(|a|,|b|); entries whose magnitude is below `floor` are compared
// against the floor instead so rounding noise on ~0 gradients is not amplified.
double relative_error(double a, double b, double floor = 1e-7) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("matvec_naive matches hand-computed products") {
  const Tensor2D w(2, 2, {1, 2, 3, 4});
  const std::vector<float> x = {5, 6};
  CHECK(matvec_naive<float>(w, x) == std::vector<float>{23, 34});

  const Tensor2D eye = Tensor2D::identity(4);
  const std::vector<float> v = {1, 2, 3, 4};
  CHECK(matvec_naive<float>(eye, v) == v);

  const Tensor2D zero(3, 5);
  const std::vector<float> any = {0.3f, -7.0f, 2.5f};
  CHECK(matvec_naive<float>(zero, any) == std::vector<float>(5, 0.0f));
}

TEST_CASE("matvec_naive agrees with a long-double oracle") {
  const Tensor2D w = gen_synthetic(37, 11, 5);
  const Tensor2D x = gen_synthetic(1, 37, 6);
  const auto y = matvec_naive<float>(w, x.row(0));
  oracle::Grid g(37, std::vector<double>(11));
  for (std::size_t i = 0; i < 37; ++i)
    for (std::size_t j = 0; j < 11; ++j) g[i][j] = w(i, j);
  const auto ref = oracle::dot_columns(g, std::vector<double>(x.row(0).begin(), x.row(0).end()));
  for (std::size_t j = 0; j < 11; ++j) CHECK(y[j] == doctest::Approx(ref[j]).epsilon(1e-5));
}

TEST_CASE("matvec_naive names both dimensions on mismatch") {
  const Tensor2D w(3, 2);
  const std::vector<float> x = {1, 2};
  try {
    matvec_naive<float>(w, x);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('2') != std::string::npos);
    CHECK(msg.find('3') != std::string::npos);
  }
}

TEST_CASE("sigmoid_exact values and identity") {
  CHECK(sigmoid_exact(0.0) == 0.5);
  CHECK(sigmoid_exact(8.0) == doctest::Approx(0.9996646498695335).epsilon(1e-15));
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = (rng.uniform01() - 0.5) * 60.0;
    CHECK(std::abs(sigmoid_exact(x) + sigmoid_exact(-x) - 1.0) <= 1e-12);
  }
  CHECK(sigmoid_exact(-800.0) == 0.0);
  CHECK(sigmoid_exact(800.0) == 1.0);
  CHECK(std::isfinite(sigmoid_exact(-1e308)));
}

TEST_CASE("feedforward_ref examples") {
  NetworkSpec spec{{2, 2}};
  const std::vector<Tensor2D> eye = {Tensor2D::identity(2)};
  const auto acts = feedforward_ref<float>(spec, eye, Tensor2D(1, 2));
  REQUIRE(acts.size() == 2);
  CHECK(acts[1](0, 0) == 0.5f);
  CHECK(acts[1](0, 1) == 0.5f);

  NetworkSpec big{{784, 256, 10}};
  const std::vector<Tensor2D> w = {gen_synthetic(784, 256, 1), gen_synthetic(256, 10, 2)};
  const auto out = feedforward_ref<float>(big, w, gen_synthetic(3, 784, 3));
  CHECK(out.back().rows() == 3);
  CHECK(out.back().cols() == 10);
}

TEST_CASE("single layer equals sigmoid of matvec per row") {
  NetworkSpec spec{{29, 13}};
  const std::vector<Tensor2D> w = {gen_synthetic(29, 13, 10)};
  const Tensor2D x = gen_synthetic(4, 29, 11);
  const auto acts = feedforward_ref<float>(spec, w, x);
  for (std::size_t n = 0; n < 4; ++n) {
    const auto pre = matvec_naive<float>(w[0], x.row(n));
    for (std::size_t j = 0; j < 13; ++j) {
      const float ref = static_cast<float>(sigmoid_exact(pre[j]));
      CHECK(std::abs(acts[1](n, j) - ref) <= 1e-12);
    }
  }
}

TEST_CASE("feedforward_ref reports the offending layer") {
  NetworkSpec spec{{4, 3, 2}};
  const std::vector<Tensor2D> w = {Tensor2D(4, 3), Tensor2D(4, 2)};
  try {
    feedforward_ref<float>(spec, w, Tensor2D(1, 4));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("layer 1") != std::string::npos);
  }
  CHECK_THROWS_AS(NetworkSpec{{5}}.validate(), InvalidArgument);
  CHECK_THROWS_AS((NetworkSpec{{5, 0}}.validate()), InvalidArgument);
}

TEST_CASE("rbm_cd1_ref with zero parameters gives half probabilities") {
  const MatrixD w(3, 4);
  const std::vector<double> vb(3, 0.0), hb(4, 0.0);
  SplitMix64 rng(1);
  const auto g = rbm_cd1_ref<double>(w, vb, hb, unit_interval(2, 3, 4), rng);
  for (double p : g.hidden_prob.values()) CHECK(p == 0.5);
}

TEST_CASE("rbm_cd1_ref is deterministic for a seed") {
  const MatrixD w = gen_synthetic(6, 5, 1).cast<double>();
  const std::vector<double> vb(6, 0.1), hb(5, -0.2);
  const MatrixD v0 = unit_interval(3, 6, 2);
  SplitMix64 r1(42), r2(42);
  const auto a = rbm_cd1_ref<double>(w, vb, hb, v0, r1);
  const auto b = rbm_cd1_ref<double>(w, vb, hb, v0, r2);
  CHECK(a.d_weights == b.d_weights);
  CHECK(a.d_visible_bias == b.d_visible_bias);
  CHECK(a.d_hidden_bias == b.d_hidden_bias);
}

TEST_CASE("1x1 rbm gradient matches the enumerated draw") {
  const double w = 0.8, vb = -0.3, hb = 0.25, v = 0.9;
  const double h0 = oracle::sigmoid(v * w + hb);
  struct Expected {
    double dw, dvb, dhb;
  };
  Expected per_draw[2];
  for (int s = 0; s < 2; ++s) {
    const double v1 = oracle::sigmoid(s * w + vb);
    const double h1 = oracle::sigmoid(v1 * w + hb);
    per_draw[s] = {v * h0 - v1 * h1, v - v1, h0 - h1};
  }
  REQUIRE(std::abs(per_draw[0].dw - per_draw[1].dw) > 1e-3);

  int seen[2] = {0, 0};
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    SplitMix64 rng(seed);
    SplitMix64 peek(seed);
    const int s = peek.uniform01() < h0 ? 1 : 0;
    const auto g = rbm_cd1_ref<double>(MatrixD(1, 1, {w}), std::vector<double>{vb},
                                       std::vector<double>{hb}, MatrixD(1, 1, {v}), rng);
    CHECK(g.d_weights(0, 0) == doctest::Approx(per_draw[s].dw).epsilon(1e-12));
    CHECK(g.d_visible_bias[0] == doctest::Approx(per_draw[s].dvb).epsilon(1e-12));
    CHECK(g.d_hidden_bias[0] == doctest::Approx(per_draw[s].dhb).epsilon(1e-12));
    ++seen[s];
  }
  CHECK(seen[0] > 0);
  CHECK(seen[1] > 0);
}

TEST_CASE("rbm_cd1_ref rejects inconsistent shapes") {
  SplitMix64 rng(1);
  const std::vector<double> vb(3, 0.0), hb(2, 0.0);
  CHECK_THROWS_AS(rbm_cd1_ref<double>(MatrixD(3, 4), vb, hb, MatrixD(1, 3), rng), DimensionError);
  CHECK_THROWS_AS(rbm_cd1_ref<double>(MatrixD(3, 2), vb, hb, MatrixD(1, 4), rng), DimensionError);
}

TEST_CASE("backprop_ref matches central differences on a 4-3-2 net") {
  NetworkSpec spec{{4, 3, 2}};
  const auto w = random_weights(spec.layer_sizes, 9);
  const MatrixD x = unit_interval(3, 4, 90);
  const MatrixD t = unit_interval(3, 2, 91);
  const auto grads = backprop_ref<double>(spec, w, x, t);

  std::vector<oracle::Grid> wg;
  for (const auto& m : w) wg.push_back(to_grid(m));
  const auto fd = oracle::finite_difference(wg, to_grid(x), to_grid(t), 1e-4);
  for (std::size_t l = 0; l < w.size(); ++l) {
    for (std::size_t i = 0; i < w[l].rows(); ++i) {
      for (std::size_t j = 0; j < w[l].cols(); ++j) {
        CHECK(relative_error(grads[l](i, j), fd[l][i][j]) <= 1e-4);
      }
    }
  }
  CHECK(mse_loss(feedforward_ref<double>(spec, w, x).back(), t) ==
        doctest::Approx(oracle::network_loss(wg, to_grid(x), to_grid(t))).epsilon(1e-12));
}

TEST_CASE("backprop_ref degenerate cases") {
  NetworkSpec spec{{5, 4, 3}};
  const auto w = random_weights(spec.layer_sizes, 4);

  const auto zero_in = backprop_ref<double>(spec, w, MatrixD(2, 5), unit_interval(2, 3, 1));
  for (double g : zero_in[0].values()) CHECK(g == 0.0);

  const MatrixD x = unit_interval(2, 5, 2);
  const MatrixD out = feedforward_ref<double>(spec, w, x).back();
  for (const auto& g : backprop_ref<double>(spec, w, x, out)) {
    for (double v : g.values()) CHECK(std::abs(v) <= 1e-12);
  }

  CHECK_THROWS_AS(backprop_ref<double>(spec, w, x, MatrixD(2, 4)), DimensionError);
  NetworkSpec pwl = spec;
  pwl.activation = ActivationKind::PwlSigmoid;
  CHECK_THROWS_AS(backprop_ref<double>(pwl, w, x, out), InvalidArgument);
}

TEST_CASE("backprop_ref agrees with finite differences on random small nets") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SplitMix64 rng(seed);
    std::vector<std::size_t> sizes = {2 + rng.next() % 7, 1 + rng.next() % 6, 1 + rng.next() % 4};
    NetworkSpec spec{sizes};
    const auto w = random_weights(sizes, seed);
    const MatrixD x = unit_interval(2, sizes[0], seed + 100);
    const MatrixD t = unit_interval(2, sizes.back(), seed + 200);
    const auto grads = backprop_ref<double>(spec, w, x, t);
    std::vector<oracle::Grid> wg;
    for (const auto& m : w) wg.push_back(to_grid(m));
    const auto fd = oracle::finite_difference(wg, to_grid(x), to_grid(t), 1e-4);
    double worst = 0.0;
    for (std::size_t l = 0; l < w.size(); ++l)
      for (std::size_t i = 0; i < w[l].rows(); ++i)
        for (std::size_t j = 0; j < w[l].cols(); ++j)
          worst = std::max(worst, relative_error(grads[l](i, j), fd[l][i][j]));
    INFO("seed " << seed);
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("profile_ops feedforward counts are analytic") {
  NetworkSpec spec{{784, 256, 256, 10}};
  const auto r = profile_ops(Workload::Feedforward, spec, 1);
  CHECK(r.mm_ops == 784u * 256 + 256u * 256 + 256u * 10);
  CHECK(r.mm_ops == 268800u);
  CHECK(r.activation_ops == 522u);
  CHECK(r.vector_ops == 0u);
  CHECK(r.mm_share() == doctest::Approx(268800.0 / 269322.0));
  CHECK(r.mm_share() > 0.998);
}

TEST_CASE("profile_ops shares sum to one") {
  for (Workload w : {Workload::Feedforward, Workload::Rbm, Workload::Backprop}) {
    const auto r = profile_ops(w, NetworkSpec{{20, 7, 3}}, 3);
    CHECK(r.mm_share() + r.activation_share() + r.vector_share() ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("profile_ops scales exactly with layer width") {
  const auto a = profile_ops(Workload::Feedforward, NetworkSpec{{64, 32}}, 2);
  const auto b = profile_ops(Workload::Feedforward, NetworkSpec{{128, 32}}, 2);
  CHECK(b.mm_ops == 2 * a.mm_ops);
  CHECK(b.activation_ops == a.activation_ops);
}

TEST_CASE("profile_ops matrix multiply dominates from 64 neurons up") {
  for (std::size_t n : {64u, 100u, 256u}) {
    for (Workload w : {Workload::Feedforward, Workload::Rbm, Workload::Backprop}) {
      const auto r = profile_ops(w, NetworkSpec{{n, n, n}}, 1);
      INFO(workload_name(w) << " " << n);
      CHECK(r.mm_share() >= 0.95);
    }
  }
}

TEST_CASE("workload names round trip") {
  for (Workload w : {Workload::Feedforward, Workload::Rbm, Workload::Backprop}) {
    CHECK(parse_workload(workload_name(w)) == w);
  }
  CHECK_THROWS_AS(parse_workload("conv"), InvalidArgument);
}
