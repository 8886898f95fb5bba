#pragma once
// Binary checkpoint of ModelParams.
//
// Layout, all integers and floats little-endian:
//   "VDIR"                       4 bytes magic
//   u32 version                  currently 1
//   u32 layer_count
//   layer_count x (u32 in, u32 out)
//   for each layer: weight (out*in f64, row-major), then bias (out f64)
//   u64 checksum                 FNV-1a 64 over every byte from layer_count
//                                through the last float
// Hidden layers are tanh and the last layer is linear; the format does not
// record activations.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "vdir/error.hpp"
#include "vdir/net.hpp"

namespace vdir::checkpoint {

inline constexpr char kMagic[4] = {'V', 'D', 'I', 'R'};
inline constexpr std::uint32_t kVersion = 1;

inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
inline void put_f64(std::vector<std::uint8_t>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint64_t uint(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) throw FormatError("checkpoint truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  double f64() { return std::bit_cast<double>(uint(8)); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> encode(const ModelParams& params) {
  params.validate();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  detail::put_u32(out, kVersion);
  const std::size_t payload_start = out.size();
  detail::put_u32(out, static_cast<std::uint32_t>(params.layers.size()));
  for (const auto& l : params.layers) {
    detail::put_u32(out, static_cast<std::uint32_t>(l.in));
    detail::put_u32(out, static_cast<std::uint32_t>(l.out));
  }
  for (const auto& l : params.layers) {
    for (double w : l.weight) detail::put_f64(out, w);
    for (double b : l.bias) detail::put_f64(out, b);
  }
  const auto sum = fnv1a64(std::span(out).subspan(payload_start));
  detail::put_u64(out, sum);
  return out;
}

inline ModelParams decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("not a checkpoint: bad magic");
  detail::Reader head(bytes.subspan(4, 4));
  const std::uint32_t version = head.u32();
  if (version != kVersion)
    throw VersionError("unsupported checkpoint version " + std::to_string(version));
  if (bytes.size() < 8 + 4 + 8) throw FormatError("checkpoint truncated");

  const auto payload = bytes.subspan(8, bytes.size() - 8 - 8);
  detail::Reader tail(bytes.subspan(bytes.size() - 8));
  if (tail.uint(8) != fnv1a64(payload)) throw ChecksumError("checkpoint checksum mismatch");

  detail::Reader r(payload);
  const std::uint32_t n_layers = r.u32();
  if (n_layers == 0 || static_cast<std::size_t>(n_layers) * 8 > r.remaining())
    throw FormatError("implausible layer count " + std::to_string(n_layers));
  ModelParams p;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dims(n_layers);
  for (auto& [in, out] : dims) {
    in = r.u32();
    out = r.u32();
  }
  std::size_t expected = 0;
  for (auto [in, out] : dims) expected += (static_cast<std::size_t>(in) + 1) * out * 8;
  if (expected != r.remaining()) throw FormatError("checkpoint payload size does not match layer dims");
  for (auto [in, out] : dims) {
    Layer l(in, out);
    for (double& w : l.weight) w = r.f64();
    for (double& b : l.bias) b = r.f64();
    p.layers.push_back(std::move(l));
  }
  p.validate();
  return p;
}

inline void save(const ModelParams& params, const std::string& path) {
  const auto bytes = encode(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline ModelParams load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode(bytes);
}

}  // namespace vdir::checkpoint
