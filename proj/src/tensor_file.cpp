#include "dlau/tensor_file.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace dlau {

namespace {

constexpr std::uint8_t kMagic[4] = {'D', 'L', 'T', '1'};
constexpr std::size_t kHeaderSize = 4 + 4 + 2 * 4 + 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | b[at + static_cast<std::size_t>(k)];
  return v;
}

using Kind = TensorFileError::Kind;

}  // namespace

std::vector<std::uint8_t> encode_tensor(const Tensor2D& t) {
  if (!t.all_finite()) throw TensorFileError(Kind::NonFinite, "tensor contains NaN or Inf");
  if (t.rows() > UINT32_MAX || t.cols() > UINT32_MAX) {
    throw TensorFileError(Kind::BadRank, "tensor dimension exceeds 32 bits");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + 4 * t.size());
  for (std::uint8_t c : kMagic) out.push_back(c);
  put_u32(out, 2);
  put_u32(out, static_cast<std::uint32_t>(t.rows()));
  put_u32(out, static_cast<std::uint32_t>(t.cols()));
  out.push_back(kDtypeF32);
  for (float v : t.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor2D decode_tensor(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw TensorFileError(Kind::Truncated, "file shorter than DLT1 header");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw TensorFileError(Kind::BadMagic, "bad magic, expected DLT1");
  }
  const std::uint32_t rank = get_u32(bytes, 4);
  if (rank != 2) {
    throw TensorFileError(Kind::BadRank, "unsupported rank " + std::to_string(rank));
  }
  if (bytes.size() < kHeaderSize) {
    throw TensorFileError(Kind::Truncated, "file shorter than DLT1 header");
  }
  const std::size_t rows = get_u32(bytes, 8);
  const std::size_t cols = get_u32(bytes, 12);
  const std::uint8_t dtype = bytes[16];
  if (dtype != kDtypeF32) {
    throw TensorFileError(Kind::BadDtype, "unsupported dtype code " + std::to_string(dtype));
  }
  const std::size_t expected = 4 * rows * cols;
  const std::size_t payload = bytes.size() - kHeaderSize;
  if (payload < expected) {
    throw TensorFileError(Kind::Truncated, "payload has " + std::to_string(payload) +
                                               " bytes, expected " + std::to_string(expected));
  }
  if (payload > expected) {
    throw TensorFileError(Kind::TrailingData, "payload has " + std::to_string(payload) +
                                                  " bytes, expected " + std::to_string(expected));
  }
  std::vector<float> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = std::bit_cast<float>(get_u32(bytes, kHeaderSize + 4 * i));
    if (!std::isfinite(data[i])) {
      throw TensorFileError(Kind::NonFinite, "non-finite value at element " + std::to_string(i));
    }
  }
  return Tensor2D(rows, cols, std::move(data));
}

void write_tensor(const std::filesystem::path& path, const Tensor2D& t) {
  const auto bytes = encode_tensor(t);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw TensorFileError(Kind::Io, "cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw TensorFileError(Kind::Io, "write failed for " + path.string());
}

Tensor2D read_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TensorFileError(Kind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_tensor(bytes);
  } catch (const TensorFileError& e) {
    throw TensorFileError(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace dlau
