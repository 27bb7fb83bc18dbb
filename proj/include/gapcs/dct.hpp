#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "gapcs/errors.hpp"

namespace gapcs {

/// Orthonormal DCT-II basis: row k is s_k cos(pi (2n+1) k / (2P)).
inline Eigen::MatrixXd dct_basis(int p) {
  if (p < 1) throw DomainError("dct_basis: size must be >= 1");
  Eigen::MatrixXd c(p, p);
  const double dc = std::sqrt(1.0 / p);
  const double ac = std::sqrt(2.0 / p);
  for (int k = 0; k < p; ++k) {
    const double scale = k == 0 ? dc : ac;
    for (int n = 0; n < p; ++n) {
      c(k, n) = scale * std::cos(std::numbers::pi * (2 * n + 1) * k /
                                 (2.0 * p));
    }
  }
  return c;
}

/// Separable 2D DCT on square patches; the basis is built once and reused.
class Dct2 {
 public:
  explicit Dct2(int p) : basis_(dct_basis(p)) {}

  const Eigen::MatrixXd& basis() const { return basis_; }

  Eigen::MatrixXd forward(const Eigen::MatrixXd& patch) const {
    check(patch);
    return basis_ * patch * basis_.transpose();
  }

  Eigen::MatrixXd inverse(const Eigen::MatrixXd& coef) const {
    check(coef);
    return basis_.transpose() * coef * basis_;
  }

 private:
  void check(const Eigen::MatrixXd& patch) const {
    if (patch.rows() != basis_.rows() || patch.cols() != basis_.rows()) {
      throw DimensionError("Dct2: patch must be square of the basis size");
    }
  }
  Eigen::MatrixXd basis_;
};

inline Eigen::MatrixXd dct2(const Eigen::MatrixXd& patch) {
  if (patch.rows() != patch.cols()) {
    throw DimensionError("dct2: patch must be square");
  }
  return Dct2(static_cast<int>(patch.rows())).forward(patch);
}

inline Eigen::MatrixXd idct2(const Eigen::MatrixXd& coef) {
  if (coef.rows() != coef.cols()) {
    throw DimensionError("idct2: patch must be square");
  }
  return Dct2(static_cast<int>(coef.rows())).inverse(coef);
}

}  // namespace gapcs
