#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dlau/tensor.hpp"

namespace dlau {

/// Weight rows distributed over T on-chip banks: row i lives in bank i % T at
/// local row i / T. Every bank holds ceil(Ni/T) rows; slots past the last
/// real row of a short edge tile are zero.
class WeightBanks {
 public:
  WeightBanks(std::size_t tile_size, std::size_t rows_per_bank, std::size_t cols);

  std::size_t tile_size() const { return banks_.size(); }
  std::size_t rows_per_bank() const { return rows_per_bank_; }
  std::size_t cols() const { return cols_; }

  static std::size_t bank_of(std::size_t row, std::size_t tile_size) { return row % tile_size; }
  static std::size_t local_row_of(std::size_t row, std::size_t tile_size) {
    return row / tile_size;
  }

  std::span<float> row(std::size_t bank, std::size_t local_row);
  std::span<const float> row(std::size_t bank, std::size_t local_row) const;

  /// Rebuilds the first `ni` rows of the original matrix.
  Tensor2D reconstruct(std::size_t ni) const;

 private:
  std::size_t rows_per_bank_;
  std::size_t cols_;
  std::vector<std::vector<float>> banks_;
};

WeightBanks load_weights_banked(const Tensor2D& w, std::size_t tile_size);

}  // namespace dlau
