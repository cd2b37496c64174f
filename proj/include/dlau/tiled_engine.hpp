#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dlau/activation.hpp"
#include "dlau/error.hpp"
#include "dlau/tensor.hpp"

namespace dlau {

struct TileConfig {
  std::size_t tile_size = 32;
  std::size_t batch_size = 1;
};

/// Half-open input range [start, end) covered by one tile.
struct TileRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  friend bool operator==(const TileRange&, const TileRange&) = default;
};

/// Ascending, contiguous cover of [0, ni); only the last range may be short.
std::vector<TileRange> tile_partition(std::size_t ni, std::size_t tile_size);

/// Tiled forward pass over any weight source exposing rows(), cols() and
/// operator()(i, j). Part sums accumulate tile by tile in ascending input
/// order and `f` runs once per output after the final tile.
template <typename Weights, typename ActivationFn>
Tensor2D tiled_forward_with(const Weights& w, const Tensor2D& x, const TileConfig& cfg,
                            ActivationFn&& f) {
  if (x.cols() != w.rows()) {
    throw DimensionError("tiled_forward: input has " + std::to_string(x.cols()) +
                         " columns, weights have " + std::to_string(w.rows()) + " rows");
  }
  if (cfg.batch_size != x.rows()) {
    throw DimensionError("tiled_forward: batch size " + std::to_string(cfg.batch_size) +
                         " does not match " + std::to_string(x.rows()) + " input rows");
  }
  const std::size_t no = w.cols();
  const auto tiles = tile_partition(w.rows(), cfg.tile_size);
  Tensor2D y(x.rows(), no);
  for (std::size_t n = 0; n < x.rows(); ++n) {
    auto out = y.row(n);
    for (const TileRange& tile : tiles) {
      for (std::size_t i = tile.start; i < tile.end; ++i) {
        const float xi = x(n, i);
        for (std::size_t j = 0; j < no; ++j) out[j] += w(i, j) * xi;
      }
    }
    for (auto& v : out) v = static_cast<float>(f(static_cast<double>(v)));
  }
  return y;
}

Tensor2D tiled_forward(const Tensor2D& w, const Tensor2D& x, const TileConfig& cfg,
                       const Activation& activation);

}  // namespace dlau
