#pragma once

#include <cstddef>
#include <cstdint>

#include "dlau/tensor.hpp"

namespace dlau {

/// rows x cols values uniform in [-0.5, 0.5), drawn row-major from
/// SplitMix64(seed).uniform_centered().
Tensor2D gen_synthetic(std::size_t rows, std::size_t cols, std::uint64_t seed);

}  // namespace dlau
