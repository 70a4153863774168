#pragma once

// Binary matrix export: a 32-byte header (magic "NRLMAT1\0", then n, N, ell as
// little-endian int64) followed by the column-major float64 entries. A sidecar
// `<path>.meta` in key = value form carries the rest of the metadata.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "nrl/discretize.hpp"
#include "nrl/harness/report.hpp"

namespace nrl {

inline constexpr std::array<char, 8> kMatrixMagic{'N', 'R', 'L', 'M', 'A', 'T', '1', '\0'};

static_assert(std::endian::native == std::endian::little, "matrix export assumes a little-endian host");

inline void write_matrix(const std::string& path, const OperatorMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out.write(kMatrixMagic.data(), kMatrixMagic.size());
  const std::int64_t head[3] = {m.dim, m.per_axis, m.ell};
  out.write(reinterpret_cast<const char*>(head), sizeof head);
  out.write(reinterpret_cast<const char*>(m.matrix.data()),
            static_cast<std::streamsize>(sizeof(double) * m.matrix.size()));
  if (!out) throw Error("short write to " + path);

  std::ofstream meta(path + ".meta", std::ios::trunc);
  if (!meta) throw Error("cannot write " + path + ".meta");
  meta << "symbol = " << m.symbol << "\n"
       << "n = " << m.dim << "\n"
       << "N = " << m.per_axis << "\n"
       << "ell = " << m.ell << "\n"
       << "rows = " << m.matrix.rows() << "\n"
       << "weight = " << fmt(m.weight) << "\n"
       << "layout = column-major float64\n";
}

inline OperatorMatrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMatrixMagic) throw Error("not a matrix file: " + path);
  std::int64_t head[3];
  in.read(reinterpret_cast<char*>(head), sizeof head);
  if (!in || head[0] < 1 || head[1] < 1) throw Error("corrupt matrix header: " + path);
  std::int64_t rows = 1;
  for (std::int64_t a = 0; a < head[0]; ++a) rows *= head[1];
  OperatorMatrix m;
  m.dim = static_cast<int>(head[0]);
  m.per_axis = static_cast<int>(head[1]);
  m.ell = static_cast<int>(head[2]);
  m.matrix.resize(rows, rows);
  in.read(reinterpret_cast<char*>(m.matrix.data()),
          static_cast<std::streamsize>(sizeof(double) * m.matrix.size()));
  if (!in) throw Error("truncated matrix data: " + path);
  return m;
}

}  // namespace nrl
