#include "dlau/tiled_engine.hpp"

#include <algorithm>

namespace dlau {

std::vector<TileRange> tile_partition(std::size_t ni, std::size_t tile_size) {
  if (ni == 0) throw InvalidArgument("tile_partition: input count must be >= 1");
  if (tile_size == 0) throw InvalidArgument("tile_partition: tile size must be >= 1");
  std::vector<TileRange> tiles;
  tiles.reserve((ni + tile_size - 1) / tile_size);
  for (std::size_t k = 0; k < ni; k += tile_size) tiles.push_back({k, std::min(k + tile_size, ni)});
  return tiles;
}

Tensor2D tiled_forward(const Tensor2D& w, const Tensor2D& x, const TileConfig& cfg,
                       const Activation& activation) {
  return tiled_forward_with(w, x, cfg, activation);
}

}  // namespace dlau
