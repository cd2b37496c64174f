#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dlau/activation.hpp"
#include "dlau/rng.hpp"
#include "dlau/sigmoid.hpp"
#include "dlau/tensor.hpp"

namespace dlau {

enum class ActivationKind { ExactSigmoid, PwlSigmoid };

/// Fully connected sigmoid network without bias terms.
struct NetworkSpec {
  std::vector<std::size_t> layer_sizes;
  ActivationKind activation = ActivationKind::ExactSigmoid;
  double pwl_k = kDefaultPwlK;

  /// Throws InvalidArgument unless there are >= 2 layers, all >= 1.
  void validate() const;
};

Activation make_activation(const NetworkSpec& spec);

/// Running tallies kept by the reference implementations when profiling.
struct OpCounter {
  std::uint64_t mm = 0;          // multiply-accumulates inside matrix products
  std::uint64_t activation = 0;  // activation-function evaluations
  std::uint64_t vector = 0;      // every other elementwise operation
};

/// out[j] = sum_i W[i][j] * x[i], summed in ascending i.
template <typename Real>
std::vector<Real> matvec_naive(const Matrix<Real>& w, std::span<const Real> x);

/// Returns the activations of every layer, input first.
template <typename Real>
std::vector<Matrix<Real>> feedforward_ref(const NetworkSpec& spec,
                                          std::span<const Matrix<Real>> weights,
                                          const Matrix<Real>& input,
                                          OpCounter* counter = nullptr);

template <typename Real>
struct RbmGradient {
  Matrix<Real> d_weights;
  std::vector<Real> d_visible_bias;
  std::vector<Real> d_hidden_bias;
  Matrix<Real> hidden_prob;  // positive-phase probabilities h0
};

/// Contrastive divergence with a single Gibbs step.
///
/// h0 = sigma(v0 W + hbias) is sampled once (row-major, u < p with u from
/// `rng.uniform01()`), the reconstruction and second hidden pass use
/// probabilities. Gradients are (v0^T h0 - v1^T h1) / batch and the matching
/// bias means.
template <typename Real>
RbmGradient<Real> rbm_cd1_ref(const Matrix<Real>& weights, std::span<const Real> visible_bias,
                              std::span<const Real> hidden_bias, const Matrix<Real>& v0,
                              SplitMix64& rng, OpCounter* counter = nullptr);

/// Mean squared error over every output element of the batch.
template <typename Real>
double mse_loss(const Matrix<Real>& output, const Matrix<Real>& target);

/// Analytic gradient of mse_loss through the sigmoid layers. Requires the
/// exact sigmoid.
template <typename Real>
std::vector<Matrix<Real>> backprop_ref(const NetworkSpec& spec,
                                       std::span<const Matrix<Real>> weights,
                                       const Matrix<Real>& input, const Matrix<Real>& target,
                                       OpCounter* counter = nullptr);

enum class Workload { Feedforward, Rbm, Backprop };

Workload parse_workload(std::string_view name);
std::string_view workload_name(Workload w);

struct OpCountReport {
  Workload workload = Workload::Feedforward;
  std::uint64_t mm_ops = 0;
  std::uint64_t activation_ops = 0;
  std::uint64_t vector_ops = 0;

  std::uint64_t total() const { return mm_ops + activation_ops + vector_ops; }
  double mm_share() const;
  double activation_share() const;
  double vector_share() const;
};

/// Runs the instrumented reference for `workload` on seeded synthetic data.
/// RBM profiles one CD-1 step per adjacent layer pair.
OpCountReport profile_ops(Workload workload, const NetworkSpec& spec, std::size_t batch);

extern template std::vector<float> matvec_naive(const Tensor2D&, std::span<const float>);
extern template std::vector<double> matvec_naive(const MatrixD&, std::span<const double>);
extern template std::vector<Tensor2D> feedforward_ref(const NetworkSpec&,
                                                      std::span<const Tensor2D>,
                                                      const Tensor2D&, OpCounter*);
extern template std::vector<MatrixD> feedforward_ref(const NetworkSpec&,
                                                     std::span<const MatrixD>, const MatrixD&,
                                                     OpCounter*);
extern template RbmGradient<float> rbm_cd1_ref(const Tensor2D&, std::span<const float>,
                                               std::span<const float>, const Tensor2D&,
                                               SplitMix64&, OpCounter*);
extern template RbmGradient<double> rbm_cd1_ref(const MatrixD&, std::span<const double>,
                                                std::span<const double>, const MatrixD&,
                                                SplitMix64&, OpCounter*);
extern template double mse_loss(const Tensor2D&, const Tensor2D&);
extern template double mse_loss(const MatrixD&, const MatrixD&);
extern template std::vector<Tensor2D> backprop_ref(const NetworkSpec&, std::span<const Tensor2D>,
                                                   const Tensor2D&, const Tensor2D&,
                                                   OpCounter*);
extern template std::vector<MatrixD> backprop_ref(const NetworkSpec&, std::span<const MatrixD>,
                                                  const MatrixD&, const MatrixD&, OpCounter*);

}  // namespace dlau
