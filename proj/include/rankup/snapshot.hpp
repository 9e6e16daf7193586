#pragma once

// Binary snapshot of a MomentState, little-endian:
//
//   char[8]  magic "RKUPSNAP"
//   u32      version (1)
//   u32      d, u32 n
//   u64      sample count N
//   f64      ridge
//   u32      resymmetrize_every
//   u8       1 if the normalized moment matrix follows the inverse
//   f64[s*s] inverse, row-major
//   f64[s*s] matrix, row-major (optional)

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

#include "rankup/moment.hpp"

namespace rankup {

inline constexpr char kSnapshotMagic[8] = {'R', 'K', 'U', 'P', 'S', 'N', 'A', 'P'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes little-endian");

namespace detail {

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(Errc::io, "truncated snapshot");
  return value;
}

inline void put_matrix(std::ostream& out, const Matrix& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = m;
  out.write(reinterpret_cast<const char*>(rows.data()),
            static_cast<std::streamsize>(rows.size() * sizeof(double)));
}

inline Matrix get_matrix(std::istream& in, Eigen::Index s) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(s, s);
  in.read(reinterpret_cast<char*>(rows.data()),
          static_cast<std::streamsize>(rows.size() * sizeof(double)));
  if (!in) throw Error(Errc::io, "truncated snapshot matrix");
  return rows;
}

}  // namespace detail

inline void save_snapshot(const MomentState& state, std::ostream& out) {
  out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
  detail::put<std::uint32_t>(out, kSnapshotVersion);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(state.basis().dimension()));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(state.basis().degree()));
  detail::put<std::uint64_t>(out, state.count());
  detail::put<double>(out, state.ridge());
  detail::put<std::uint32_t>(out, state.resymmetrize_every());
  detail::put<std::uint8_t>(out, state.tracks_matrix() ? 1 : 0);
  detail::put_matrix(out, state.inverse());
  if (state.tracks_matrix()) detail::put_matrix(out, *state.matrix());
  if (!out) throw Error(Errc::io, "failed to write snapshot");
}

inline MomentState load_snapshot(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSnapshotMagic, sizeof(magic)) != 0) {
    throw Error(Errc::io, "not a rankup snapshot");
  }
  const auto version = detail::get<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw Error(Errc::io, "unsupported snapshot version " + std::to_string(version));
  }
  const auto d = detail::get<std::uint32_t>(in);
  const auto n = detail::get<std::uint32_t>(in);
  const auto count = detail::get<std::uint64_t>(in);
  const auto ridge = detail::get<double>(in);
  const auto resym = detail::get<std::uint32_t>(in);
  const auto has_matrix = detail::get<std::uint8_t>(in);
  auto basis = std::make_shared<const MonomialBasis>(d, n);
  const auto s = static_cast<Eigen::Index>(basis->size());
  Matrix inverse = detail::get_matrix(in, s);
  std::optional<Matrix> matrix;
  if (has_matrix != 0) matrix = detail::get_matrix(in, s);
  return MomentState(std::move(basis), count, std::move(inverse), std::move(matrix), ridge, resym);
}

inline void save_snapshot(const MomentState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path + " for writing");
  save_snapshot(state, out);
}

inline MomentState load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  return load_snapshot(in);
}

}  // namespace rankup
