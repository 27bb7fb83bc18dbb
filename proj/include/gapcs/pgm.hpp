#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "gapcs/errors.hpp"

namespace gapcs {

namespace detail {

// next whitespace-delimited token, skipping '#' comment lines
inline std::string pgm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  return token;
}

}  // namespace detail

/// Binary PGM (P5, maxval 255). Values load as doubles in [0, 255].
inline Eigen::MatrixXd load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  if (detail::pgm_token(in) != "P5") {
    throw ParseError(path.string() + " is not a binary PGM (P5)");
  }
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(detail::pgm_token(in));
    height = std::stoi(detail::pgm_token(in));
    maxval = std::stoi(detail::pgm_token(in));
  } catch (const std::exception&) {
    throw ParseError("bad PGM header in " + path.string());
  }
  if (width < 1 || height < 1) throw ParseError("bad PGM dims");
  if (maxval < 1 || maxval > 255) {
    throw ParseError("only 8-bit PGM supported, maxval=" +
                     std::to_string(maxval));
  }
  Eigen::MatrixXd image(height, width);
  std::vector<unsigned char> row(static_cast<std::size_t>(width));
  for (int r = 0; r < height; ++r) {
    in.read(reinterpret_cast<char*>(row.data()), width);
    if (!in) throw ParseError("truncated PGM payload in " + path.string());
    for (int c = 0; c < width; ++c) image(r, c) = row[static_cast<std::size_t>(c)];
  }
  return image;
}

/// Writes rounded values clamped to [0, 255].
inline void save_pgm(const Eigen::MatrixXd& image,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << "P5\n" << image.cols() << ' ' << image.rows() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(image.cols()));
  for (Eigen::Index r = 0; r < image.rows(); ++r) {
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      const double v = std::round(image(r, c));
      row[static_cast<std::size_t>(c)] =
          static_cast<unsigned char>(std::clamp(v, 0.0, 255.0));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace gapcs
