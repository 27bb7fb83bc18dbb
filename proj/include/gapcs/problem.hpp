#pragma once

#include <Eigen/Dense>
#include <utility>

#include "gapcs/errors.hpp"
#include "gapcs/sensing_operator.hpp"

namespace gapcs {

/// A sensing problem bundle: operator, ground-truth K-sparse signal, additive
/// noise and the measurements y = A x_true + noise. Immutable after
/// construction; safe to share across concurrent solver runs.
struct ProblemInstance {
  SensingOperator op;
  Eigen::VectorXd x_true;
  Eigen::VectorXd noise;
  Eigen::VectorXd y;
  int sparsity_k = 0;
};

inline ProblemInstance make_problem(SensingOperator op, Eigen::VectorXd x_true,
                                    Eigen::VectorXd noise) {
  if (x_true.size() != op.cols()) {
    throw DimensionError("x_true length must equal operator columns");
  }
  if (noise.size() != op.rows()) {
    throw DimensionError("noise length must equal operator rows");
  }
  Eigen::VectorXd y = op.apply(x_true) + noise;
  const int k = static_cast<int>((x_true.array() != 0.0).count());
  return ProblemInstance{std::move(op), std::move(x_true), std::move(noise),
                         std::move(y), k};
}

inline ProblemInstance make_noiseless_problem(SensingOperator op,
                                              Eigen::VectorXd x_true) {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(op.rows());
  return make_problem(std::move(op), std::move(x_true), std::move(zero));
}

}  // namespace gapcs
