#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "infotrack/errors.hpp"
#include "infotrack/mlp.hpp"

namespace infotrack {

/// Q-network checkpoint format, all little-endian:
///   magic "QNET1"
///   u32 number of layer sizes
///   u32[] layer sizes [input, hidden.., output]
///   u8  float width in bits (64)
///   u8  byte-order marker (1 = little-endian)
///   per affine layer: weights row-major (out x in f64), then biases (f64)
///   u64 FNV-1a checksum over everything above
namespace checkpoint_detail {

inline constexpr char kMagic[5] = {'Q', 'N', 'E', 'T', '1'};

inline void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& buf, double d) { put_u64(buf, std::bit_cast<std::uint64_t>(d)); }

class Reader {
 public:
  Reader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(byte()); }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  unsigned char byte() {
    if (pos_ >= data_.size()) {
      throw ChecksumMismatch("truncated checkpoint: " + path_);
    }
    return static_cast<unsigned char>(data_[pos_++]);
  }

  const std::string& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

inline std::uint64_t fnv1a_bytes(const char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace checkpoint_detail

inline void save_checkpoint(const Mlp& net, const std::string& path) {
  namespace d = checkpoint_detail;
  std::string buf;
  buf.append(d::kMagic, sizeof(d::kMagic));
  const auto& sizes = net.layer_sizes();
  d::put_u32(buf, static_cast<std::uint32_t>(sizes.size()));
  for (int s : sizes) d::put_u32(buf, static_cast<std::uint32_t>(s));
  buf.push_back(64);  // float width
  buf.push_back(1);   // little-endian
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto& w = net.weights[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) d::put_f64(buf, w(i, j));
    }
    for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) d::put_f64(buf, net.biases[l](i));
  }
  d::put_u64(buf, d::fnv1a_bytes(buf.data(), buf.size()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open checkpoint for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw ConfigError("failed writing checkpoint: " + path);
}

inline Mlp load_checkpoint(const std::string& path) {
  namespace d = checkpoint_detail;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (data.size() < sizeof(d::kMagic) + 8 ||
      std::memcmp(data.data(), d::kMagic, sizeof(d::kMagic)) != 0) {
    throw ChecksumMismatch("not a QNET1 checkpoint: " + path);
  }
  const std::uint64_t expected = d::fnv1a_bytes(data.data(), data.size() - 8);
  d::Reader r(data, path);
  for (std::size_t i = 0; i < sizeof(d::kMagic); ++i) r.u8();

  const std::uint32_t n_sizes = r.u32();
  if (n_sizes < 2 || n_sizes > 64) throw ChecksumMismatch("implausible layer count in " + path);
  std::vector<int> sizes;
  sizes.reserve(n_sizes);
  for (std::uint32_t i = 0; i < n_sizes; ++i) sizes.push_back(static_cast<int>(r.u32()));
  const std::uint8_t float_width = r.u8();
  const std::uint8_t byte_order = r.u8();
  if (float_width != 64) throw ChecksumMismatch("unsupported float width in " + path);
  if (byte_order != 1) throw ChecksumMismatch("unsupported byte order in " + path);

  Rng dummy(0);
  Mlp net(sizes, dummy);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    auto& w = net.weights[l];
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = r.f64();
    }
    for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) net.biases[l](i) = r.f64();
  }
  if (r.remaining() != 8) throw ChecksumMismatch("checkpoint size mismatch: " + path);
  const std::uint64_t stored = r.u64();
  if (stored != expected) {
    throw ChecksumMismatch("checkpoint checksum mismatch: " + path);
  }
  return net;
}

}  // namespace infotrack
