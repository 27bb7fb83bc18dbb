#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "gapcs/errors.hpp"
#include "gapcs/rng.hpp"

namespace gapcs {

enum class MatrixKind { Gaussian, Binary };

inline const char* to_string(MatrixKind k) {
  return k == MatrixKind::Gaussian ? "gaussian" : "binary";
}

/// Exactly k standard-normal values at uniformly random distinct positions;
/// deterministic per seed.
inline Eigen::VectorXd gen_sparse_signal(int n, int k, std::uint64_t seed) {
  if (k < 0 || k > n) throw DomainError("gen_sparse_signal: need 0 <= k <= n");
  SplitRng rng(seed, kSignalStream);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<int> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  for (int i = 0; i < k; ++i) {
    const int j = i + rng.uniform_int(n - i);
    std::swap(indices[i], indices[j]);
    double v = rng.normal();
    while (v == 0.0) v = rng.normal();
    x[indices[i]] = v;
  }
  return x;
}

/// Gaussian: entries i.i.d. N(0, 1/M). Binary: entries +-1/sqrt(M) with equal
/// probability. Deterministic per seed; filled row-major.
inline Eigen::MatrixXd gen_sensing_matrix(int m, int n, MatrixKind kind,
                                          std::uint64_t seed) {
  if (m < 1 || n < 1 || m > n) {
    throw DomainError("gen_sensing_matrix: need 1 <= m <= n");
  }
  SplitRng rng(seed, kMatrixStream);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXd a(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i, j) = kind == MatrixKind::Gaussian
                    ? scale * rng.normal()
                    : (rng.next_u64() & 1u ? scale : -scale);
    }
  }
  return a;
}

struct NoisyMeasurement {
  Eigen::VectorXd y;
  Eigen::VectorXd noise;
};

/// Gaussian noise rescaled so ||clean||^2 / ||noise||^2 matches snr_db
/// exactly. An infinite snr_db yields zero noise.
inline NoisyMeasurement add_noise(const Eigen::VectorXd& clean, double snr_db,
                                  std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) {
    return {clean, Eigen::VectorXd::Zero(clean.size())};
  }
  const double clean_norm = clean.norm();
  if (clean_norm == 0.0) {
    throw DomainError("add_noise: clean signal is zero with finite SNR");
  }
  SplitRng rng(seed, kNoiseStream);
  Eigen::VectorXd g(clean.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
  const double g_norm = g.norm();
  const double target = clean_norm * std::pow(10.0, -snr_db / 20.0);
  Eigen::VectorXd noise = g * (target / g_norm);
  return {clean + noise, std::move(noise)};
}

/// i.i.d. N(0, sigma^2) noise vector; deterministic per seed.
inline Eigen::VectorXd gaussian_noise(int m, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw DomainError("gaussian_noise: sigma must be >= 0");
  SplitRng rng(seed, kNoiseStream);
  Eigen::VectorXd noise(m);
  for (int i = 0; i < m; ++i) noise[i] = sigma * rng.normal();
  return noise;
}

/// Unbiased sample standard deviation.
inline double sample_std(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  const double mean = v.mean();
  const double ss = (v.array() - mean).square().sum();
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace gapcs
