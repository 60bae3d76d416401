#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "hydrofrac/dynamics.hpp"

// Binary state snapshot, little-endian:
//   "HPE1" | u16 version | u64 n_x | u64 n_z | f64 t | f64 u[(n_z+1) * n_x]
// u is the physical array, row-major with x fastest.

namespace hydrofrac {

class CheckpointError : public IoError {
 public:
  enum class Kind { magic, version, truncated, io, shape };
  CheckpointError(Kind kind, const std::string& what) : IoError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::array<char, 4> checkpoint_magic{'H', 'P', 'E', '1'};
inline constexpr std::uint16_t checkpoint_version = 1;

namespace detail {

template <class T>
void put_le(std::vector<char>& out, T v) {
  std::array<char, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  out.insert(out.end(), b.begin(), b.end());
}

template <class T>
T get_le(const std::vector<char>& in, std::size_t& pos) {
  if (in.size() - pos < sizeof(T))
    throw CheckpointError(CheckpointError::Kind::truncated, "checkpoint is truncated");
  std::array<char, sizeof(T)> b;
  std::memcpy(b.data(), in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

}  // namespace detail

inline std::vector<char> encode_checkpoint(const State& s) {
  const Field u = s.u.to_physical();
  const Grid& g = u.grid();
  std::vector<char> out(checkpoint_magic.begin(), checkpoint_magic.end());
  detail::put_le<std::uint16_t>(out, checkpoint_version);
  detail::put_le<std::uint64_t>(out, g.n_x);
  detail::put_le<std::uint64_t>(out, g.n_z);
  detail::put_le<double>(out, s.t);
  for (double v : u.values()) detail::put_le<double>(out, v);
  return out;
}

inline State decode_checkpoint(const std::vector<char>& in) {
  if (in.size() < 4) throw CheckpointError(CheckpointError::Kind::truncated, "checkpoint is truncated");
  if (!std::equal(checkpoint_magic.begin(), checkpoint_magic.end(), in.begin()))
    throw CheckpointError(CheckpointError::Kind::magic, "not a checkpoint (bad magic)");
  std::size_t pos = 4;
  const auto version = detail::get_le<std::uint16_t>(in, pos);
  if (version != checkpoint_version)
    throw CheckpointError(CheckpointError::Kind::version,
                          "unsupported checkpoint version " + std::to_string(version));
  const auto nx = detail::get_le<std::uint64_t>(in, pos);
  const auto nz = detail::get_le<std::uint64_t>(in, pos);
  const double t = detail::get_le<double>(in, pos);
  Grid g;
  try {
    g = Grid(nx, nz);
  } catch (const Error& e) {
    throw CheckpointError(CheckpointError::Kind::shape, std::string("bad checkpoint grid: ") + e.what());
  }
  const std::size_t need = g.physical_size() * sizeof(double);
  if (in.size() - pos < need) throw CheckpointError(CheckpointError::Kind::truncated, "checkpoint is truncated");
  Field u(g, Representation::physical, "u");
  for (double& v : u.values()) v = detail::get_le<double>(in, pos);
  return State{std::move(u), t, 0};
}

inline void write_checkpoint(const std::string& path, const State& s) {
  const auto bytes = encode_checkpoint(s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CheckpointError::Kind::io, "cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError(CheckpointError::Kind::io, "write failed: " + path);
}

inline State read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CheckpointError::Kind::io, "cannot open " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace hydrofrac
