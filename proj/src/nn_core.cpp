#include "dlau/nn_core.hpp"

#include <string>

#include "dlau/error.hpp"
#include "dlau/synthetic.hpp"

namespace dlau {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// y = X W with every output summed in ascending input index.
template <typename Real>
Matrix<Real> matmul_ascending(const Matrix<Real>& x, const Matrix<Real>& w, OpCounter* counter) {
  Matrix<Real> y(x.rows(), w.cols());
  for (std::size_t n = 0; n < x.rows(); ++n) {
    auto out = y.row(n);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const Real xi = x(n, i);
      const auto wrow = w.row(i);
      for (std::size_t j = 0; j < w.cols(); ++j) out[j] += wrow[j] * xi;
    }
  }
  if (counter) counter->mm += x.rows() * w.rows() * w.cols();
  return y;
}

// y = X W^T, i.e. y[n][i] = sum_j X[n][j] W[i][j].
template <typename Real>
Matrix<Real> matmul_transposed(const Matrix<Real>& x, const Matrix<Real>& w, OpCounter* counter) {
  Matrix<Real> y(x.rows(), w.rows());
  for (std::size_t n = 0; n < x.rows(); ++n) {
    for (std::size_t i = 0; i < w.rows(); ++i) {
      Real acc = 0;
      const auto wrow = w.row(i);
      for (std::size_t j = 0; j < w.cols(); ++j) acc += x(n, j) * wrow[j];
      y(n, i) = acc;
    }
  }
  if (counter) counter->mm += x.rows() * w.rows() * w.cols();
  return y;
}

// acc[i][j] += sum_n a[n][i] * b[n][j]
template <typename Real>
void accumulate_outer(Matrix<Real>& acc, const Matrix<Real>& a, const Matrix<Real>& b,
                      OpCounter* counter) {
  for (std::size_t n = 0; n < a.rows(); ++n) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const Real ai = a(n, i);
      auto row = acc.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) row[j] += ai * b(n, j);
    }
  }
  if (counter) counter->mm += a.rows() * a.cols() * b.cols();
}

template <typename Real>
void add_bias_and_sigmoid(Matrix<Real>& m, std::span<const Real> bias, OpCounter* counter) {
  for (std::size_t n = 0; n < m.rows(); ++n) {
    auto row = m.row(n);
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = static_cast<Real>(sigmoid_exact(static_cast<double>(row[j] + bias[j])));
    }
  }
  if (counter) {
    counter->vector += m.size();
    counter->activation += m.size();
  }
}

template <typename Real>
void check_chain(const NetworkSpec& spec, std::span<const Matrix<Real>> weights,
                 const Matrix<Real>& input) {
  spec.validate();
  const auto& sizes = spec.layer_sizes;
  if (weights.size() != sizes.size() - 1) {
    throw DimensionError("network has " + std::to_string(sizes.size() - 1) +
                         " weight layers but " + std::to_string(weights.size()) +
                         " matrices were given");
  }
  if (input.cols() != sizes[0]) {
    throw DimensionError("input has " + std::to_string(input.cols()) + " columns, layer 0 has " +
                         std::to_string(sizes[0]) + " neurons");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != sizes[l] || weights[l].cols() != sizes[l + 1]) {
      throw DimensionError("weight layer " + std::to_string(l) + " is " +
                           shape(weights[l].rows(), weights[l].cols()) + ", expected " +
                           shape(sizes[l], sizes[l + 1]));
    }
  }
}

}  // namespace

void NetworkSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw InvalidArgument("a network needs at least 2 layers, got " +
                          std::to_string(layer_sizes.size()));
  }
  for (std::size_t l = 0; l < layer_sizes.size(); ++l) {
    if (layer_sizes[l] == 0) {
      throw InvalidArgument("layer " + std::to_string(l) + " has zero neurons");
    }
  }
}

Activation make_activation(const NetworkSpec& spec) {
  if (spec.activation == ActivationKind::PwlSigmoid) {
    return Activation::pwl(build_pwl_table(spec.pwl_k));
  }
  return Activation::exact();
}

template <typename Real>
std::vector<Real> matvec_naive(const Matrix<Real>& w, std::span<const Real> x) {
  if (x.size() != w.rows()) {
    throw DimensionError("matvec: input length " + std::to_string(x.size()) +
                         " does not match weight rows " + std::to_string(w.rows()));
  }
  std::vector<Real> out(w.cols(), Real{0});
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto wrow = w.row(i);
    for (std::size_t j = 0; j < w.cols(); ++j) out[j] += wrow[j] * x[i];
  }
  return out;
}

template <typename Real>
std::vector<Matrix<Real>> feedforward_ref(const NetworkSpec& spec,
                                          std::span<const Matrix<Real>> weights,
                                          const Matrix<Real>& input, OpCounter* counter) {
  check_chain(spec, weights, input);
  const Activation f = make_activation(spec);
  std::vector<Matrix<Real>> acts;
  acts.reserve(weights.size() + 1);
  acts.push_back(input);
  for (const auto& w : weights) {
    Matrix<Real> y = matmul_ascending(acts.back(), w, counter);
    for (auto& v : y.values()) v = static_cast<Real>(f(static_cast<double>(v)));
    if (counter) counter->activation += y.size();
    acts.push_back(std::move(y));
  }
  return acts;
}

template <typename Real>
RbmGradient<Real> rbm_cd1_ref(const Matrix<Real>& weights, std::span<const Real> visible_bias,
                              std::span<const Real> hidden_bias, const Matrix<Real>& v0,
                              SplitMix64& rng, OpCounter* counter) {
  const std::size_t nv = weights.rows();
  const std::size_t nh = weights.cols();
  if (visible_bias.size() != nv || hidden_bias.size() != nh || v0.cols() != nv) {
    throw DimensionError("rbm: weights " + shape(nv, nh) + ", visible bias " +
                         std::to_string(visible_bias.size()) + ", hidden bias " +
                         std::to_string(hidden_bias.size()) + ", v0 " +
                         shape(v0.rows(), v0.cols()));
  }
  if (v0.rows() == 0) throw DimensionError("rbm: empty batch");
  const std::size_t batch = v0.rows();

  Matrix<Real> h0 = matmul_ascending(v0, weights, counter);
  add_bias_and_sigmoid(h0, hidden_bias, counter);

  Matrix<Real> h0_sample(batch, nh);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t j = 0; j < nh; ++j) {
      h0_sample(n, j) = rng.uniform01() < static_cast<double>(h0(n, j)) ? Real{1} : Real{0};
    }
  }
  if (counter) counter->vector += batch * nh;

  Matrix<Real> v1 = matmul_transposed(h0_sample, weights, counter);
  add_bias_and_sigmoid(v1, visible_bias, counter);
  Matrix<Real> h1 = matmul_ascending(v1, weights, counter);
  add_bias_and_sigmoid(h1, hidden_bias, counter);

  // Fold 1/batch and the sign of the negative phase into the visible
  // operands so both outer products accumulate into one matrix.
  const Real inv_batch = Real{1} / static_cast<Real>(batch);
  Matrix<Real> pos = v0;
  Matrix<Real> neg = v1;
  for (auto& v : pos.values()) v *= inv_batch;
  for (auto& v : neg.values()) v *= -inv_batch;
  if (counter) counter->vector += 2 * batch * nv;

  RbmGradient<Real> grad;
  grad.d_weights = Matrix<Real>(nv, nh);
  accumulate_outer(grad.d_weights, pos, h0, counter);
  accumulate_outer(grad.d_weights, neg, h1, counter);

  grad.d_visible_bias.assign(nv, Real{0});
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t i = 0; i < nv; ++i) grad.d_visible_bias[i] += pos(n, i) + neg(n, i);
  }
  grad.d_hidden_bias.assign(nh, Real{0});
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t j = 0; j < nh; ++j) grad.d_hidden_bias[j] += h0(n, j) - h1(n, j);
  }
  for (auto& v : grad.d_hidden_bias) v *= inv_batch;
  if (counter) counter->vector += 2 * batch * nv + 2 * batch * nh + nh;

  grad.hidden_prob = std::move(h0);
  return grad;
}

template <typename Real>
double mse_loss(const Matrix<Real>& output, const Matrix<Real>& target) {
  if (output.rows() != target.rows() || output.cols() != target.cols()) {
    throw DimensionError("loss: output " + shape(output.rows(), output.cols()) + " vs target " +
                         shape(target.rows(), target.cols()));
  }
  double sum = 0.0;
  const auto y = output.values();
  const auto t = target.values();
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = static_cast<double>(y[i]) - static_cast<double>(t[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(output.size());
}

template <typename Real>
std::vector<Matrix<Real>> backprop_ref(const NetworkSpec& spec,
                                       std::span<const Matrix<Real>> weights,
                                       const Matrix<Real>& input, const Matrix<Real>& target,
                                       OpCounter* counter) {
  if (spec.activation != ActivationKind::ExactSigmoid) {
    throw InvalidArgument("backprop_ref differentiates the exact sigmoid only");
  }
  const auto acts = feedforward_ref(spec, weights, input, counter);
  const Matrix<Real>& out = acts.back();
  if (target.rows() != out.rows() || target.cols() != out.cols()) {
    throw DimensionError("target is " + shape(target.rows(), target.cols()) +
                         ", network output is " + shape(out.rows(), out.cols()));
  }

  // dL/dy for L = mean((y - t)^2), then through the sigmoid: y (1 - y).
  const Real scale = Real{2} / static_cast<Real>(out.size());
  Matrix<Real> delta(out.rows(), out.cols());
  for (std::size_t e = 0; e < out.size(); ++e) {
    const Real y = out.values()[e];
    delta.values()[e] = (y - target.values()[e]) * scale * y * (Real{1} - y);
  }
  if (counter) counter->vector += 5 * out.size();

  std::vector<Matrix<Real>> grads(weights.size());
  for (std::size_t l = weights.size(); l-- > 0;) {
    grads[l] = Matrix<Real>(weights[l].rows(), weights[l].cols());
    accumulate_outer(grads[l], acts[l], delta, counter);
    if (l == 0) break;
    Matrix<Real> back = matmul_transposed(delta, weights[l], counter);
    const Matrix<Real>& a = acts[l];
    for (std::size_t e = 0; e < back.size(); ++e) {
      const Real y = a.values()[e];
      back.values()[e] *= y * (Real{1} - y);
    }
    if (counter) counter->vector += 3 * back.size();
    delta = std::move(back);
  }
  return grads;
}

Workload parse_workload(std::string_view name) {
  if (name == "feedforward" || name == "ff") return Workload::Feedforward;
  if (name == "rbm") return Workload::Rbm;
  if (name == "bp" || name == "backprop") return Workload::Backprop;
  throw InvalidArgument("unknown workload '" + std::string(name) +
                        "' (expected feedforward, rbm or bp)");
}

std::string_view workload_name(Workload w) {
  switch (w) {
    case Workload::Feedforward: return "feedforward";
    case Workload::Rbm: return "rbm";
    case Workload::Backprop: return "bp";
  }
  return "unknown";
}

double OpCountReport::mm_share() const {
  return total() ? static_cast<double>(mm_ops) / static_cast<double>(total()) : 0.0;
}
double OpCountReport::activation_share() const {
  return total() ? static_cast<double>(activation_ops) / static_cast<double>(total()) : 0.0;
}
double OpCountReport::vector_share() const {
  return total() ? static_cast<double>(vector_ops) / static_cast<double>(total()) : 0.0;
}

OpCountReport profile_ops(Workload workload, const NetworkSpec& spec, std::size_t batch) {
  spec.validate();
  if (batch == 0) throw InvalidArgument("profile batch must be >= 1");
  NetworkSpec exact = spec;
  exact.activation = ActivationKind::ExactSigmoid;
  const auto& sizes = exact.layer_sizes;

  std::vector<MatrixD> weights;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    weights.push_back(gen_synthetic(sizes[l], sizes[l + 1], 1000 + l).cast<double>());
  }
  // Inputs in [0, 1) so they double as visible-unit probabilities.
  auto unit_interval = [](std::size_t rows, std::size_t cols, std::uint64_t seed) {
    MatrixD m = gen_synthetic(rows, cols, seed).cast<double>();
    for (auto& v : m.values()) v += 0.5;
    return m;
  };

  OpCounter counter;
  switch (workload) {
    case Workload::Feedforward:
      feedforward_ref<double>(exact, weights, unit_interval(batch, sizes[0], 1), &counter);
      break;
    case Workload::Rbm: {
      SplitMix64 rng(7);
      for (std::size_t l = 0; l < weights.size(); ++l) {
        const std::vector<double> vbias(sizes[l], 0.0);
        const std::vector<double> hbias(sizes[l + 1], 0.0);
        rbm_cd1_ref<double>(weights[l], vbias, hbias, unit_interval(batch, sizes[l], 2 + l), rng,
                            &counter);
      }
      break;
    }
    case Workload::Backprop:
      backprop_ref<double>(exact, weights, unit_interval(batch, sizes[0], 1),
                           unit_interval(batch, sizes.back(), 3), &counter);
      break;
  }
  OpCountReport report;
  report.workload = workload;
  report.mm_ops = counter.mm;
  report.activation_ops = counter.activation;
  report.vector_ops = counter.vector;
  return report;
}

template std::vector<float> matvec_naive(const Tensor2D&, std::span<const float>);
template std::vector<double> matvec_naive(const MatrixD&, std::span<const double>);
template std::vector<Tensor2D> feedforward_ref(const NetworkSpec&, std::span<const Tensor2D>,
                                               const Tensor2D&, OpCounter*);
template std::vector<MatrixD> feedforward_ref(const NetworkSpec&, std::span<const MatrixD>,
                                              const MatrixD&, OpCounter*);
template RbmGradient<float> rbm_cd1_ref(const Tensor2D&, std::span<const float>,
                                        std::span<const float>, const Tensor2D&, SplitMix64&,
                                        OpCounter*);
template RbmGradient<double> rbm_cd1_ref(const MatrixD&, std::span<const double>,
                                         std::span<const double>, const MatrixD&, SplitMix64&,
                                         OpCounter*);
template double mse_loss(const Tensor2D&, const Tensor2D&);
template double mse_loss(const MatrixD&, const MatrixD&);
template std::vector<Tensor2D> backprop_ref(const NetworkSpec&, std::span<const Tensor2D>,
                                            const Tensor2D&, const Tensor2D&, OpCounter*);
template std::vector<MatrixD> backprop_ref(const NetworkSpec&, std::span<const MatrixD>,
                                           const MatrixD&, const MatrixD&, OpCounter*);

}  // namespace dlau
