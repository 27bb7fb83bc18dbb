#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gapcs/dct.hpp"
#include "gapcs/errors.hpp"
#include "gapcs/patches.hpp"
#include "gapcs/sensing_operator.hpp"
#include "gapcs/solver.hpp"
#include "gapcs/synth.hpp"

namespace gapcs {

/// 10 log10(peak^2 / MSE); +infinity when the images agree exactly.
inline double psnr(const Eigen::MatrixXd& reference,
                   const Eigen::MatrixXd& candidate, double peak = 255.0) {
  if (reference.rows() != candidate.rows() ||
      reference.cols() != candidate.cols()) {
    throw DimensionError("psnr: shape mismatch");
  }
  const double mse = (reference - candidate).squaredNorm() /
                     static_cast<double>(reference.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

enum class PatchTransform { Dct, Identity };

struct ImageCsSpec {
  Eigen::MatrixXd image;          // grayscale, values in [0, 255]
  double measurement_rate = 0.10; // M = round(rate * H * W)
  int patch_size = 8;
  int stride = 4;
  Algorithm algorithm = Algorithm::Gap;
  double alpha = 1.0;
  double m_star_fraction = 0.10;  // fraction of patch coefficients kept
  std::optional<double> snr_db;
  std::uint64_t seed = 1;
  int max_iters = 200;
  double stop_epsilon = 1e-14;
  PatchTransform transform = PatchTransform::Dct;
  bool store_iterates = false;
};

struct ImageCsResult {
  Eigen::MatrixXd reconstruction;
  std::vector<double> psnr_trace;  // PSNR of w_t against the input, t >= 1
  std::vector<double> err_trace;   // ||w_t - x||^2 including t = 0
  int iterations_run = 0;
  StopReason stop_reason = StopReason::MaxIters;
  int m_star = 0;
  int measurements = 0;
  double e_max = 0.0;
  std::vector<Eigen::VectorXd> w_trace;  // filled when store_iterates
};

/// Measures the vectorized image with a Gaussian operator and reconstructs it
/// by alternating the projection step with shrinkage of the patchwise DCT
/// coefficients (one global threshold across all patches).
///
/// The AIT variant runs at step alpha / e_max: the aggregated iterate is
/// dense in pixel space, so the plain gradient step is only stable below
/// 2 / e_max.
inline ImageCsResult run_image_cs(const ImageCsSpec& spec) {
  const auto h = static_cast<int>(spec.image.rows());
  const auto w_cols = static_cast<int>(spec.image.cols());
  if (h < 1 || w_cols < 1) throw DomainError("run_image_cs: empty image");
  if (!(spec.measurement_rate > 0.0 && spec.measurement_rate <= 1.0)) {
    throw DomainError("run_image_cs: measurement_rate must be in (0, 1]");
  }
  if (spec.patch_size > std::min(h, w_cols)) {
    throw DomainError("run_image_cs: patch_size exceeds image");
  }
  if (spec.stride < 1 || spec.stride > spec.patch_size) {
    throw DomainError("run_image_cs: need 1 <= stride <= patch_size");
  }
  if (!(spec.m_star_fraction > 0.0 && spec.m_star_fraction <= 1.0)) {
    throw DomainError("run_image_cs: m_star_fraction must be in (0, 1]");
  }

  const int n = h * w_cols;
  const int m = std::max<int>(
      1, static_cast<int>(std::llround(spec.measurement_rate * n)));
  const auto op = build_operator(
      gen_sensing_matrix(m, n, MatrixKind::Gaussian, spec.seed));

  const Eigen::VectorXd x_true =
      Eigen::Map<const Eigen::VectorXd>(spec.image.data(), n);
  const Eigen::VectorXd clean = op.apply(x_true);
  const Eigen::VectorXd y =
      spec.snr_db ? add_noise(clean, *spec.snr_db, spec.seed).y : clean;

  const Dct2 dct(spec.patch_size);
  const std::vector<int> row_pos =
      patch_positions(h, spec.patch_size, spec.stride);
  const std::vector<int> col_pos =
      patch_positions(w_cols, spec.patch_size, spec.stride);
  const int patch_count =
      static_cast<int>(row_pos.size()) * static_cast<int>(col_pos.size());
  const int coeff_total = patch_count * spec.patch_size * spec.patch_size;
  const int m_star = std::max<int>(
      1, static_cast<int>(std::llround(spec.m_star_fraction * coeff_total)));

  const double step = spec.algorithm == Algorithm::Gap
                          ? spec.alpha
                          : spec.alpha / op.e_max();

  ImageCsResult result;
  result.m_star = m_star;
  result.measurements = m;
  result.e_max = op.e_max();

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w_prev = w;
  result.err_trace.push_back(x_true.squaredNorm());
  if (spec.store_iterates) result.w_trace.push_back(w);

  for (int t = 1; t <= spec.max_iters; ++t) {
    w = spec.algorithm == Algorithm::Gap ? gap_step(theta, y, step, op)
                                         : ait_step(theta, y, step, op);

    // shrink in the patch coefficient domain
    const Eigen::MatrixXd w_image =
        Eigen::Map<const Eigen::MatrixXd>(w.data(), h, w_cols);
    PatchSet set = extract_patches(w_image, spec.patch_size, spec.stride);
    std::vector<Eigen::MatrixXd> coefs(set.patches.size());
    for (std::size_t i = 0; i < set.patches.size(); ++i) {
      coefs[i] = spec.transform == PatchTransform::Dct
                     ? dct.forward(set.patches[i])
                     : set.patches[i];
    }
    Eigen::VectorXd all(coeff_total);
    Eigen::Index offset = 0;
    for (const auto& c : coefs) {
      all.segment(offset, c.size()) =
          Eigen::Map<const Eigen::VectorXd>(c.data(), c.size());
      offset += c.size();
    }
    const double lambda = select_lambda(all, m_star);
    const Eigen::VectorXd shrunk = shrink(all, lambda);
    offset = 0;
    for (std::size_t i = 0; i < set.patches.size(); ++i) {
      const Eigen::MatrixXd c = Eigen::Map<const Eigen::MatrixXd>(
          shrunk.data() + offset, spec.patch_size, spec.patch_size);
      offset += c.size();
      set.patches[i] = spec.transform == PatchTransform::Dct
                           ? dct.inverse(c)
                           : c;
    }
    const Eigen::MatrixXd theta_image = aggregate_patches(set);
    theta = Eigen::Map<const Eigen::VectorXd>(theta_image.data(), n);

    result.err_trace.push_back((w - x_true).squaredNorm());
    const Eigen::MatrixXd w_as_image =
        Eigen::Map<const Eigen::MatrixXd>(w.data(), h, w_cols);
    result.psnr_trace.push_back(psnr(spec.image, w_as_image));
    if (spec.store_iterates) result.w_trace.push_back(w);
    result.iterations_run = t;

    if (!w.allFinite() || result.err_trace.back() > 1e12) {
      result.stop_reason = StopReason::Diverged;
      break;
    }
    if ((w - w_prev).squaredNorm() < spec.stop_epsilon) {
      result.stop_reason = StopReason::IterateChange;
      break;
    }
    w_prev = w;
  }
  if (result.iterations_run == spec.max_iters &&
      result.stop_reason != StopReason::Diverged &&
      result.stop_reason != StopReason::IterateChange) {
    result.stop_reason = StopReason::MaxIters;
  }
  result.reconstruction = Eigen::Map<const Eigen::MatrixXd>(w.data(), h, w_cols);
  return result;
}

/// Deterministic smooth grayscale test pattern with integer values.
inline Eigen::MatrixXd make_demo_image(int rows, int cols) {
  if (rows < 1 || cols < 1) throw DomainError("make_demo_image: bad shape");
  Eigen::MatrixXd image(rows, cols);
  const double cx = cols / 3.0;
  const double cy = 2.0 * rows / 3.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double wave = 55.0 * std::sin(2.0 * std::numbers::pi * c / 40.0) *
                          std::cos(2.0 * std::numbers::pi * r / 28.0);
      const double blob =
          30.0 * std::exp(-((c - cx) * (c - cx) + (r - cy) * (r - cy)) / 180.0);
      image(r, c) = std::clamp(std::round(128.0 + wave + blob), 0.0, 255.0);
    }
  }
  return image;
}

}  // namespace gapcs
