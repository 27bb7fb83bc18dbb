#pragma once

#include <Eigen/Dense>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gapcs/errors.hpp"

namespace gapcs {

/// Shortest decimal that round-trips a double ("%.17g").
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// CSV, row-major, one row per line, comma separated.
inline void save_matrix_csv(const Eigen::MatrixXd& m,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell =
          line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') {
        throw ParseError("bad numeric cell '" + cell + "' in " +
                         path.string());
      }
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged rows in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty matrix file " + path.string());
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return m;
}

namespace detail {

inline void put_u32_le(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{
      static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
      static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b.data(), 4);
}

inline std::uint32_t get_u32_le(std::istream& in) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f64_le(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

inline double get_f64_le(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace detail

/// Raw binary: 8-byte header of two little-endian u32 dims (M, N), followed
/// by M*N little-endian f64 values in row-major order.
inline void save_matrix_bin(const Eigen::MatrixXd& m,
                            const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  detail::put_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  detail::put_u32_le(out, static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) detail::put_f64_le(out, m(i, j));
}

inline Eigen::MatrixXd load_matrix_bin(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  const std::uint32_t rows = detail::get_u32_le(in);
  const std::uint32_t cols = detail::get_u32_le(in);
  if (!in) throw ParseError("truncated header in " + path.string());
  Eigen::MatrixXd m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = detail::get_f64_le(in);
  if (!in) throw ParseError("truncated payload in " + path.string());
  return m;
}

}  // namespace gapcs
