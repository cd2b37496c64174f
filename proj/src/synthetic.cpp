#include "dlau/synthetic.hpp"

#include "dlau/rng.hpp"

namespace dlau {

Tensor2D gen_synthetic(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Tensor2D t(rows, cols);
  for (auto& v : t.values()) v = rng.uniform_centered();
  return t;
}

}  // namespace dlau
