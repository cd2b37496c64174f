#include "dlau/weight_banks.hpp"

#include <algorithm>
#include <string>

#include "dlau/error.hpp"

namespace dlau {

WeightBanks::WeightBanks(std::size_t tile_size, std::size_t rows_per_bank, std::size_t cols)
    : rows_per_bank_(rows_per_bank),
      cols_(cols),
      banks_(tile_size, std::vector<float>(rows_per_bank * cols, 0.0f)) {
  if (tile_size == 0) throw InvalidArgument("tile size must be >= 1");
}

std::span<float> WeightBanks::row(std::size_t bank, std::size_t local_row) {
  return {banks_.at(bank).data() + local_row * cols_, cols_};
}

std::span<const float> WeightBanks::row(std::size_t bank, std::size_t local_row) const {
  return {banks_.at(bank).data() + local_row * cols_, cols_};
}

Tensor2D WeightBanks::reconstruct(std::size_t ni) const {
  if (ni > rows_per_bank_ * tile_size()) {
    throw DimensionError("cannot reconstruct " + std::to_string(ni) + " rows from " +
                         std::to_string(rows_per_bank_ * tile_size()) + " bank slots");
  }
  Tensor2D w(ni, cols_);
  for (std::size_t i = 0; i < ni; ++i) {
    const auto src = row(bank_of(i, tile_size()), local_row_of(i, tile_size()));
    std::copy(src.begin(), src.end(), w.row(i).begin());
  }
  return w;
}

WeightBanks load_weights_banked(const Tensor2D& w, std::size_t tile_size) {
  if (tile_size == 0) throw InvalidArgument("tile size must be >= 1");
  if (w.empty()) throw DimensionError("cannot bank an empty weight matrix");
  const std::size_t per_bank = (w.rows() + tile_size - 1) / tile_size;
  WeightBanks banks(tile_size, per_bank, w.cols());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const auto src = w.row(i);
    auto dst = banks.row(WeightBanks::bank_of(i, tile_size),
                         WeightBanks::local_row_of(i, tile_size));
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return banks;
}

}  // namespace dlau
