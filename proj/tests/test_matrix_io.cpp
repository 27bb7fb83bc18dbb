#include "gapcs/matrix_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gapcs/rng.hpp"

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("gapcs_io_" + name);
}

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  gapcs::SplitRng rng(seed, 0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal() * std::exp(rng.normal());
  return m;
}

TEST(MatrixCsv, RoundTripIsExact) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Eigen::MatrixXd m = random_matrix(5, 7, seed);
    const auto path = temp_file("roundtrip.csv");
    gapcs::save_matrix_csv(m, path);
    const Eigen::MatrixXd back = gapcs::load_matrix_csv(path);
    ASSERT_EQ(back.rows(), m.rows());
    ASSERT_EQ(back.cols(), m.cols());
    EXPECT_TRUE(back == m);  // %.17g reproduces doubles exactly
  }
}

TEST(MatrixCsv, MalformedCellThrows) {
  const auto path = temp_file("bad.csv");
  std::ofstream(path) << "1.0,2.0\n3.0,oops\n";
  EXPECT_THROW(gapcs::load_matrix_csv(path), gapcs::ParseError);
}

TEST(MatrixCsv, RaggedRowsThrow) {
  const auto path = temp_file("ragged.csv");
  std::ofstream(path) << "1.0,2.0\n3.0\n";
  EXPECT_THROW(gapcs::load_matrix_csv(path), gapcs::ParseError);
}

TEST(MatrixCsv, EmptyFileThrows) {
  const auto path = temp_file("empty.csv");
  std::ofstream(path) << "";
  EXPECT_THROW(gapcs::load_matrix_csv(path), gapcs::ParseError);
}

TEST(MatrixBin, RoundTripIsBitwise) {
  const Eigen::MatrixXd m = random_matrix(9, 4, 11);
  const auto path = temp_file("roundtrip.bin");
  gapcs::save_matrix_bin(m, path);
  const Eigen::MatrixXd back = gapcs::load_matrix_bin(path);
  ASSERT_EQ(back.rows(), 9);
  ASSERT_EQ(back.cols(), 4);
  EXPECT_TRUE(back == m);
}

TEST(MatrixBin, HeaderHoldsDims) {
  const Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 5);
  const auto path = temp_file("dims.bin");
  gapcs::save_matrix_bin(m, path);
  std::ifstream in(path, std::ios::binary);
  unsigned char header[8];
  in.read(reinterpret_cast<char*>(header), 8);
  EXPECT_EQ(header[0], 3u);
  EXPECT_EQ(header[4], 5u);
  EXPECT_EQ(fs::file_size(path), 8u + 3u * 5u * 8u);
}

TEST(MatrixBin, TruncatedThrows) {
  const auto path = temp_file("short.bin");
  std::ofstream(path, std::ios::binary) << "\x02";
  EXPECT_THROW(gapcs::load_matrix_bin(path), gapcs::ParseError);
}

}  // namespace
