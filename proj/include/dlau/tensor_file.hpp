#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dlau/error.hpp"
#include "dlau/tensor.hpp"

namespace dlau {

// DLT1 layout, all integers little-endian:
//   "DLT1" | u32 rank (=2) | u32 dims[rank] | u8 dtype (1 = f32 LE) | payload
inline constexpr std::uint8_t kDtypeF32 = 1;

class TensorFileError : public Error {
 public:
  enum class Kind { Io, BadMagic, BadRank, BadDtype, Truncated, TrailingData, NonFinite };

  TensorFileError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<std::uint8_t> encode_tensor(const Tensor2D& t);
Tensor2D decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const std::filesystem::path& path, const Tensor2D& t);
Tensor2D read_tensor(const std::filesystem::path& path);

}  // namespace dlau
