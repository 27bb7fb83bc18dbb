#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <string>
#include <utility>

#include "gapcs/errors.hpp"

namespace gapcs {

/// Dense measurement operator A (M x N, M <= N) with a precomputed Cholesky
/// factorization of the Gram matrix AA^T and its exact eigenvalue extremes.
///
/// Construction performs a full symmetric eigendecomposition of AA^T; the
/// factorization is computed once and reused by every Gram solve. Instances
/// are immutable after construction and safe to share across threads.
class SensingOperator {
 public:
  /// Builds the operator; `tolerance` is the absolute cutoff on the smallest
  /// eigenvalue of AA^T below which the Gram is considered singular.
  SensingOperator(Eigen::MatrixXd entries, double tolerance)
      : entries_(std::move(entries)) {
    if (tolerance <= 0.0) throw DomainError("tolerance must be positive");
    if (entries_.rows() > entries_.cols()) {
      throw DimensionError("operator requires M <= N, got " +
                           std::to_string(entries_.rows()) + " x " +
                           std::to_string(entries_.cols()));
    }
    const Eigen::MatrixXd gram = entries_ * entries_.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram,
                                                       Eigen::EigenvaluesOnly);
    e_min_ = eig.eigenvalues().minCoeff();
    e_max_ = eig.eigenvalues().maxCoeff();
    if (e_min_ < tolerance) {
      throw SingularGram("smallest eigenvalue of AA^T is " +
                         std::to_string(e_min_) + ", below tolerance " +
                         std::to_string(tolerance));
    }
    gram_llt_.compute(gram);
    if (gram_llt_.info() != Eigen::Success) {
      throw SingularGram("Cholesky factorization of AA^T failed");
    }
  }

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double e_max() const { return e_max_; }
  double e_min() const { return e_min_; }

  /// A x.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    if (x.size() != cols()) {
      throw DimensionError("apply: expected length " + std::to_string(cols()));
    }
    return entries_ * x;
  }

  /// A^T v.
  Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& v) const {
    if (v.size() != rows()) {
      throw DimensionError("apply_adjoint: expected length " +
                           std::to_string(rows()));
    }
    return entries_.transpose() * v;
  }

  /// Solves (AA^T) u = v using the stored factorization.
  Eigen::VectorXd gram_solve(const Eigen::VectorXd& v) const {
    if (v.size() != rows()) {
      throw DimensionError("gram_solve: expected length " +
                           std::to_string(rows()));
    }
    return gram_llt_.solve(v);
  }

 private:
  Eigen::MatrixXd entries_;
  Eigen::LLT<Eigen::MatrixXd> gram_llt_;
  double e_max_ = 0.0;
  double e_min_ = 0.0;
};

/// Builds an operator with an explicit absolute singularity tolerance.
inline SensingOperator build_operator(Eigen::MatrixXd entries,
                                      double tolerance) {
  return SensingOperator(std::move(entries), tolerance);
}

/// Default tolerance: 1e-12 relative to e_max, so singularity detection is
/// scale-free.
inline SensingOperator build_operator(Eigen::MatrixXd entries) {
  if (entries.rows() > entries.cols()) {
    throw DimensionError("operator requires M <= N");
  }
  const Eigen::MatrixXd gram = entries * entries.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram,
                                                     Eigen::EigenvaluesOnly);
  const double e_max = eig.eigenvalues().maxCoeff();
  const double tol = 1e-12 * (e_max > 0.0 ? e_max : 1.0);
  return SensingOperator(std::move(entries), tol);
}

/// u with (AA^T) u = v.
inline Eigen::VectorXd apply_gram_inverse(const SensingOperator& op,
                                          const Eigen::VectorXd& v) {
  return op.gram_solve(v);
}

}  // namespace gapcs
