#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "gapcs/errors.hpp"
#include "gapcs/rng.hpp"
#include "gapcs/sensing_operator.hpp"

namespace gapcs {

/// min(C(n, k), cap + 1) without intermediate overflow.
inline std::uint64_t binomial_capped(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(c + 0.5L);
}

namespace detail {

inline double subset_rip_value(const Eigen::MatrixXd& a,
                               const std::vector<int>& subset) {
  const auto s = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd cols(a.rows(), s);
  for (Eigen::Index j = 0; j < s; ++j) cols.col(j) = a.col(subset[j]);
  const Eigen::MatrixXd gram = cols.transpose() * cols;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram,
                                                     Eigen::EigenvaluesOnly);
  return std::max(1.0 - eig.eigenvalues().minCoeff(),
                  eig.eigenvalues().maxCoeff() - 1.0);
}

}  // namespace detail

/// Exact RIP constant delta_s by enumerating every s-column subset.
///
/// The returned value may equal or exceed 1; callers decide whether the
/// 0 < delta < 1 hypothesis holds. Intended for desk-scale matrices only.
inline double rip_constant_exact(const Eigen::MatrixXd& a, int s,
                                 std::uint64_t subset_cap = 1'000'000) {
  const int n = static_cast<int>(a.cols());
  if (s < 1 || s > n) throw DomainError("rip_constant_exact: s out of range");
  if (binomial_capped(n, s, subset_cap) > subset_cap) {
    throw TooManySubsets("C(" + std::to_string(n) + ", " + std::to_string(s) +
                         ") exceeds cap " + std::to_string(subset_cap));
  }
  std::vector<int> subset(s);
  std::iota(subset.begin(), subset.end(), 0);
  double delta = 0.0;
  while (true) {
    delta = std::max(delta, detail::subset_rip_value(a, subset));
    // next combination in lexicographic order
    int i = s - 1;
    while (i >= 0 && subset[i] == n - s + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < s; ++j) subset[j] = subset[j - 1] + 1;
  }
  return delta;
}

inline double rip_constant_exact(const SensingOperator& op, int s,
                                 std::uint64_t subset_cap = 1'000'000) {
  return rip_constant_exact(op.entries(), s, subset_cap);
}

/// Monte-Carlo lower bound on delta_s from randomly sampled subsets.
/// Useful where enumeration is intractable; always <= the exact constant.
inline double rip_constant_sampled(const Eigen::MatrixXd& a, int s,
                                   int num_samples, SplitRng& rng) {
  const int n = static_cast<int>(a.cols());
  if (s < 1 || s > n) throw DomainError("rip_constant_sampled: s out of range");
  std::vector<int> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  std::vector<int> subset(s);
  double delta = 0.0;
  for (int sample = 0; sample < num_samples; ++sample) {
    for (int i = 0; i < s; ++i) {
      const int j = i + rng.uniform_int(n - i);
      std::swap(indices[i], indices[j]);
      subset[i] = indices[i];
    }
    delta = std::max(delta, detail::subset_rip_value(a, subset));
  }
  return delta;
}

/// True iff delta_s of U*A equals delta_s of A within 1e-10, for orthonormal
/// U. Left-multiplication by an orthonormal matrix preserves column Grams,
/// hence the RIP constant.
inline bool rip_invariance_check(const SensingOperator& op,
                                 const Eigen::MatrixXd& orthonormal_u, int s,
                                 std::uint64_t subset_cap = 1'000'000) {
  const auto m = op.rows();
  if (orthonormal_u.rows() != m || orthonormal_u.cols() != m) {
    throw DimensionError("rip_invariance_check: U must be M x M");
  }
  const Eigen::MatrixXd residual =
      orthonormal_u * orthonormal_u.transpose() -
      Eigen::MatrixXd::Identity(m, m);
  if (residual.cwiseAbs().maxCoeff() > 1e-10) {
    throw NotOrthonormal("UU^T deviates from identity by " +
                         std::to_string(residual.cwiseAbs().maxCoeff()));
  }
  const double d_a = rip_constant_exact(op.entries(), s, subset_cap);
  const double d_ua =
      rip_constant_exact(orthonormal_u * op.entries(), s, subset_cap);
  return std::abs(d_a - d_ua) <= 1e-10;
}

/// True iff the nonzero eigenvalues of AA^T and A^T A agree within 1e-8
/// relative error (they share the squared singular values of A).
inline bool shared_spectrum_check(const SensingOperator& op) {
  const Eigen::MatrixXd& a = op.entries();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(
      Eigen::MatrixXd(a * a.transpose()), Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> large(
      Eigen::MatrixXd(a.transpose() * a), Eigen::EigenvaluesOnly);
  std::vector<double> ev_small(small.eigenvalues().data(),
                               small.eigenvalues().data() + a.rows());
  std::vector<double> ev_large(large.eigenvalues().data(),
                               large.eigenvalues().data() + a.cols());
  std::sort(ev_small.rbegin(), ev_small.rend());
  std::sort(ev_large.rbegin(), ev_large.rend());
  const double scale = std::max(ev_small.front(), 1e-300);
  for (std::size_t i = 0; i < ev_small.size(); ++i) {
    const double denom = std::max(std::abs(ev_small[i]), scale * 1e-12);
    if (std::abs(ev_small[i] - ev_large[i]) / denom > 1e-8) return false;
  }
  // the trailing N - M eigenvalues of A^T A must vanish
  for (std::size_t i = ev_small.size(); i < ev_large.size(); ++i) {
    if (std::abs(ev_large[i]) > 1e-8 * scale) return false;
  }
  return true;
}

}  // namespace gapcs
