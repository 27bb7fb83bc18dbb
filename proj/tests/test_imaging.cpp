#include "gapcs/image_cs.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "gapcs/dct.hpp"
#include "gapcs/patches.hpp"
#include "gapcs/pgm.hpp"
#include "gapcs/problem.hpp"
#include "gapcs/rng.hpp"

namespace {

namespace fs = std::filesystem;

Eigen::MatrixXd random_byte_image(int rows, int cols, std::uint64_t seed) {
  gapcs::SplitRng rng(seed, 0);
  Eigen::MatrixXd image(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) image(r, c) = rng.uniform_int(256);
  return image;
}

TEST(Dct, BasisIsOrthonormal) {
  for (int p : {1, 4, 8}) {
    const Eigen::MatrixXd c = gapcs::dct_basis(p);
    const Eigen::MatrixXd gram = c * c.transpose();
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(Dct, ConstantPatchConcentratesInDc) {
  const double value = 7.25;
  const int p = 8;
  const Eigen::MatrixXd coef =
      gapcs::dct2(Eigen::MatrixXd::Constant(p, p, value));
  EXPECT_NEAR(coef(0, 0), value * p, 1e-10);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i || j) EXPECT_NEAR(coef(i, j), 0.0, 1e-12);
}

TEST(Dct, ZeroMapsToZero) {
  EXPECT_EQ(gapcs::dct2(Eigen::MatrixXd::Zero(8, 8)).norm(), 0.0);
}

TEST(Dct, ParsevalAndRoundTrip) {
  const Eigen::MatrixXd patch = random_byte_image(8, 8, 3);
  const Eigen::MatrixXd coef = gapcs::dct2(patch);
  EXPECT_NEAR(coef.squaredNorm() / patch.squaredNorm(), 1.0, 1e-10);
  EXPECT_LT((gapcs::idct2(coef) - patch).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dct, RejectsNonSquare) {
  EXPECT_THROW(gapcs::dct2(Eigen::MatrixXd::Zero(4, 6)),
               gapcs::DimensionError);
}

TEST(PatchPositions, ClampsFinalWindow) {
  EXPECT_EQ(gapcs::patch_positions(8, 8, 4), (std::vector<int>{0}));
  EXPECT_EQ(gapcs::patch_positions(16, 8, 4), (std::vector<int>{0, 4, 8}));
  EXPECT_EQ(gapcs::patch_positions(14, 8, 4), (std::vector<int>{0, 4, 6}));
  EXPECT_THROW(gapcs::patch_positions(6, 8, 4), gapcs::DomainError);
  EXPECT_THROW(gapcs::patch_positions(16, 8, 9), gapcs::DomainError);
}

TEST(Patches, SinglePatchRoundTrip) {
  const Eigen::MatrixXd image = random_byte_image(8, 8, 5);
  const auto set = gapcs::extract_patches(image, 8, 4);
  EXPECT_EQ(set.patches.size(), 1u);
  EXPECT_EQ(gapcs::aggregate_patches(set), image);
}

TEST(Patches, NinePatchCoverAndExactRoundTrip) {
  const Eigen::MatrixXd image = random_byte_image(16, 16, 6);
  const auto set = gapcs::extract_patches(image, 8, 4);
  EXPECT_EQ(set.patches.size(), 9u);
  EXPECT_EQ(gapcs::aggregate_patches(set), image);
}

TEST(Patches, LargeImageRoundTripIsExact) {
  const Eigen::MatrixXd image = random_byte_image(64, 64, 7);
  EXPECT_EQ(gapcs::aggregate_patches(gapcs::extract_patches(image, 8, 4)),
            image);
}

TEST(Patches, OverlapsAreAveraged) {
  // two overlapping 2x2 patches on a 2x3 canvas disagree on the middle column
  gapcs::PatchSet set;
  set.image_rows = 2;
  set.image_cols = 3;
  set.patch_size = 2;
  set.patches = {Eigen::MatrixXd::Constant(2, 2, 1.0),
                 Eigen::MatrixXd::Constant(2, 2, 3.0)};
  set.positions = {{0, 0}, {0, 1}};
  const Eigen::MatrixXd out = gapcs::aggregate_patches(set);
  EXPECT_DOUBLE_EQ(out(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(out(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(out(0, 2), 3.0);
}

TEST(Psnr, KnownValues) {
  const Eigen::MatrixXd ref = random_byte_image(16, 16, 8);
  EXPECT_TRUE(std::isinf(gapcs::psnr(ref, ref)));
  const Eigen::MatrixXd off_by_one = ref.array() + 1.0;  // MSE = 1
  EXPECT_NEAR(gapcs::psnr(ref, off_by_one), 48.1308, 1e-4);
  const Eigen::MatrixXd off_by_peak = ref.array() + 255.0;  // MSE = peak^2
  EXPECT_NEAR(gapcs::psnr(ref, off_by_peak), 0.0, 1e-12);
  EXPECT_THROW(gapcs::psnr(ref, Eigen::MatrixXd::Zero(4, 4)),
               gapcs::DimensionError);
}

TEST(ImageCs, FullSamplingRecoversImmediately) {
  gapcs::ImageCsSpec spec;
  spec.image = gapcs::make_demo_image(16, 16);
  spec.measurement_rate = 1.0;
  spec.patch_size = 8;
  spec.stride = 4;
  spec.max_iters = 5;
  const auto result = gapcs::run_image_cs(spec);
  ASSERT_FALSE(result.psnr_trace.empty());
  EXPECT_GT(result.psnr_trace.back(), 100.0);
}

TEST(ImageCs, DegeneratesToVectorSolverBitwise) {
  const int size = 16;
  const Eigen::MatrixXd image = random_byte_image(size, size, 9);
  const int n = size * size;
  const double rate = 0.5;

  gapcs::ImageCsSpec spec;
  spec.image = image;
  spec.measurement_rate = rate;
  spec.patch_size = size;
  spec.stride = size;
  spec.transform = gapcs::PatchTransform::Identity;
  spec.m_star_fraction = 0.125;  // -> m* = 32 of 256
  spec.seed = 4;
  spec.max_iters = 40;
  spec.store_iterates = true;
  const auto image_result = gapcs::run_image_cs(spec);

  auto op = gapcs::build_operator(gapcs::gen_sensing_matrix(
      static_cast<int>(std::llround(rate * n)), n,
      gapcs::MatrixKind::Gaussian, spec.seed));
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(image.data(), n);
  auto problem = gapcs::make_problem(std::move(op), std::move(x),
                                     Eigen::VectorXd::Zero(
                                         static_cast<Eigen::Index>(
                                             std::llround(rate * n))));
  gapcs::SolverConfig config;
  config.m_star = 32;
  config.max_iters = 40;
  config.track_truth = problem.x_true;
  const auto vector_trace = gapcs::run_solver(problem, config);

  ASSERT_EQ(image_result.iterations_run, vector_trace.iterations_run);
  ASSERT_EQ(image_result.w_trace.size(), vector_trace.w.size());
  for (std::size_t t = 0; t < vector_trace.w.size(); ++t) {
    EXPECT_EQ(image_result.w_trace[t], vector_trace.w[t]) << "iteration " << t;
  }
  ASSERT_EQ(image_result.err_trace.size(), vector_trace.err_w.size());
  for (std::size_t t = 0; t < vector_trace.err_w.size(); ++t) {
    EXPECT_EQ(image_result.err_trace[t], vector_trace.err_w[t]);
  }
}

TEST(ImageCs, ProjectionBeatsGradientAtLowRate) {
  gapcs::ImageCsSpec spec;
  spec.image = gapcs::make_demo_image(32, 32);
  spec.measurement_rate = 0.15;
  spec.m_star_fraction = 0.10;
  spec.seed = 2;
  spec.max_iters = 80;
  spec.algorithm = gapcs::Algorithm::Gap;
  const auto gap = gapcs::run_image_cs(spec);
  spec.algorithm = gapcs::Algorithm::Ait;
  const auto ait = gapcs::run_image_cs(spec);
  EXPECT_GE(gap.psnr_trace.back(), ait.psnr_trace.back());
  auto eventually_monotone = [](const std::vector<double>& trace) {
    for (std::size_t i = 5; i + 1 < trace.size(); ++i) {
      if (trace[i + 1] < trace[i] - 1e-9) return false;
    }
    return true;
  };
  EXPECT_TRUE(eventually_monotone(gap.psnr_trace));
  EXPECT_TRUE(eventually_monotone(ait.psnr_trace));
}

TEST(ImageCs, RejectsBadSpecs) {
  gapcs::ImageCsSpec spec;
  spec.image = gapcs::make_demo_image(16, 16);
  spec.measurement_rate = 0.0;
  EXPECT_THROW(gapcs::run_image_cs(spec), gapcs::DomainError);
  spec.measurement_rate = 0.5;
  spec.patch_size = 32;
  EXPECT_THROW(gapcs::run_image_cs(spec), gapcs::DomainError);
  spec.patch_size = 8;
  spec.stride = 12;
  EXPECT_THROW(gapcs::run_image_cs(spec), gapcs::DomainError);
}

TEST(DemoImage, DeterministicBytesInRange) {
  const Eigen::MatrixXd a = gapcs::make_demo_image(64, 64);
  EXPECT_EQ(a, gapcs::make_demo_image(64, 64));
  EXPECT_GE(a.minCoeff(), 0.0);
  EXPECT_LE(a.maxCoeff(), 255.0);
  EXPECT_EQ(a, a.array().round().matrix());
}

TEST(Pgm, RoundTripAndHeaderHandling) {
  const Eigen::MatrixXd image = random_byte_image(12, 17, 10);
  const auto path = fs::temp_directory_path() / "gapcs_test.pgm";
  gapcs::save_pgm(image, path);
  EXPECT_EQ(gapcs::load_pgm(path), image);

  const auto commented = fs::temp_directory_path() / "gapcs_comment.pgm";
  {
    std::ofstream out(commented, std::ios::binary);
    out << "P5\n# a comment\n2 2\n255\n";
    const unsigned char data[4] = {0, 128, 200, 255};
    out.write(reinterpret_cast<const char*>(data), 4);
  }
  const Eigen::MatrixXd small = gapcs::load_pgm(commented);
  EXPECT_DOUBLE_EQ(small(0, 1), 128.0);
  EXPECT_DOUBLE_EQ(small(1, 1), 255.0);

  const auto bad = fs::temp_directory_path() / "gapcs_bad.pgm";
  std::ofstream(bad, std::ios::binary) << "P2\n2 2\n255\n0 0 0 0\n";
  EXPECT_THROW(gapcs::load_pgm(bad), gapcs::ParseError);
}

}  // namespace
