#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gapcs/errors.hpp"
#include "gapcs/matrix_io.hpp"
#include "gapcs/problem.hpp"
#include "gapcs/sensing_operator.hpp"

namespace gapcs {

enum class Algorithm { Gap, Ait };

enum class StopReason { IterateChange, ErrorTarget, MaxIters, Diverged };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::IterateChange: return "iterate_change";
    case StopReason::ErrorTarget: return "error_target";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::Diverged: return "diverged";
  }
  return "unknown";
}

inline const char* to_string(Algorithm a) {
  return a == Algorithm::Gap ? "gap" : "ait";
}

struct SolverConfig {
  Algorithm algorithm = Algorithm::Gap;
  double alpha = 1.0;          // projection step-size
  int m_star = 1;              // support budget, intended m_star >= K
  int max_iters = 500;
  double stop_epsilon = 1e-14; // stop when ||w_{t+1} - w_t||^2 < stop_epsilon
  std::optional<double> stop_err;  // truth-error stop; needs track_truth
  std::optional<Eigen::VectorXd> track_truth;
  bool store_iterates = true;  // keep full w_t / theta_t history
};

/// Everything a run produced, one record per iteration (index 0 is the
/// all-zero initial state). When truth is tracked err_w[t] = ||w_t - x*||^2.
struct IterateTrace {
  std::vector<Eigen::VectorXd> w;
  std::vector<Eigen::VectorXd> theta;
  std::vector<double> lambda;
  std::vector<double> err_w;
  std::vector<double> err_theta;
  std::vector<std::vector<int>> support;

  int iterations_run = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIters;

  Eigen::VectorXd final_w;
  Eigen::VectorXd final_theta;
  Eigen::VectorXd prev_theta;  // the theta that produced final_w

  // in-loop diagnostics
  double max_consistency_residual = 0.0;  // GAP: ||Aw - ay - (1-a)A theta|| / ||y||
  int max_support_size = 0;
  double max_threshold_excess = 0.0;      // max of lambda_t - min_{supp} |w_i|
};

/// The (m_star+1)-th largest magnitude of w under a descending sort;
/// 0 when m_star >= N. Ties at the cut are permitted.
inline double select_lambda(const Eigen::VectorXd& w, int m_star) {
  if (m_star < 1) throw DomainError("select_lambda: m_star must be >= 1");
  if (m_star >= w.size()) return 0.0;
  std::vector<double> mags(static_cast<std::size_t>(w.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i)
    mags[static_cast<std::size_t>(i)] = std::abs(w[i]);
  std::nth_element(mags.begin(), mags.begin() + m_star, mags.end(),
                   std::greater<>());
  return mags[static_cast<std::size_t>(m_star)];
}

/// Soft thresholding: sign(w_i) * max(|w_i| - lambda, 0); zeros stay zero.
inline Eigen::VectorXd shrink(const Eigen::VectorXd& w, double lambda) {
  if (lambda < 0.0) throw DomainError("shrink: lambda must be >= 0");
  Eigen::VectorXd out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double mag = std::abs(w[i]) - lambda;
    out[i] = mag > 0.0 ? (w[i] > 0.0 ? mag : -mag) : 0.0;
  }
  return out;
}

/// GAP projection step: theta + alpha * A^T (AA^T)^{-1} (y - A theta).
/// Algebraic consequence: A w = alpha y + (1 - alpha) A theta.
inline Eigen::VectorXd gap_step(const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& y, double alpha,
                                const SensingOperator& op) {
  if (theta.size() != op.cols() || y.size() != op.rows()) {
    throw DimensionError("gap_step: inconsistent dimensions");
  }
  const Eigen::VectorXd residual = y - op.apply(theta);
  return theta + alpha * op.apply_adjoint(op.gram_solve(residual));
}

/// Plain gradient step: theta + alpha * A^T (y - A theta).
inline Eigen::VectorXd ait_step(const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& y, double alpha,
                                const SensingOperator& op) {
  if (theta.size() != op.cols() || y.size() != op.rows()) {
    throw DimensionError("ait_step: inconsistent dimensions");
  }
  const Eigen::VectorXd residual = y - op.apply(theta);
  return theta + alpha * op.apply_adjoint(residual);
}

/// Residual-based noise estimate at a converged pair: A (w_next - theta) / alpha.
inline Eigen::VectorXd estimate_noise(const Eigen::VectorXd& w_next,
                                      const Eigen::VectorXd& theta,
                                      double alpha,
                                      const SensingOperator& op) {
  if (alpha <= 0.0) throw DomainError("estimate_noise: alpha must be > 0");
  if (w_next.size() != op.cols() || theta.size() != op.cols()) {
    throw DimensionError("estimate_noise: inconsistent dimensions");
  }
  return op.apply(w_next - theta) / alpha;
}

namespace detail {

inline std::vector<int> support_of(const Eigen::VectorXd& v) {
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) idx.push_back(static_cast<int>(i));
  return idx;
}

}  // namespace detail

/// Alternates the projection step and adaptive shrinkage from theta_0 = 0
/// until the iterate change drops below stop_epsilon, an optional truth-error
/// target is met, max_iters is exhausted, or the divergence guard fires.
inline IterateTrace run_solver(const ProblemInstance& problem,
                               const SolverConfig& config) {
  if (config.alpha <= 0.0) throw DomainError("run_solver: alpha must be > 0");
  if (config.m_star < 1 || config.m_star > problem.op.cols()) {
    throw DomainError("run_solver: m_star out of range");
  }
  if (config.max_iters < 1) throw DomainError("run_solver: max_iters >= 1");
  if (config.stop_err && !config.track_truth) {
    throw DomainError("run_solver: stop_err requires track_truth");
  }
  const auto n = problem.op.cols();
  const bool tracked = config.track_truth.has_value();
  if (tracked && config.track_truth->size() != n) {
    throw DimensionError("run_solver: track_truth length mismatch");
  }
  const double y_norm = problem.y.norm();
  const double consistency_scale = y_norm > 0.0 ? y_norm : 1.0;

  IterateTrace trace;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);

  auto record = [&](const Eigen::VectorXd& wv, const Eigen::VectorXd& tv,
                    double lambda) {
    if (config.store_iterates) {
      trace.w.push_back(wv);
      trace.theta.push_back(tv);
    }
    trace.lambda.push_back(lambda);
    trace.support.push_back(detail::support_of(tv));
    trace.max_support_size = std::max(
        trace.max_support_size, static_cast<int>(trace.support.back().size()));
    if (tracked) {
      trace.err_w.push_back((wv - *config.track_truth).squaredNorm());
      trace.err_theta.push_back((tv - *config.track_truth).squaredNorm());
    }
  };
  record(w, theta, 0.0);

  trace.stop_reason = StopReason::MaxIters;
  Eigen::VectorXd w_prev = w;
  Eigen::VectorXd theta_prev = theta;
  for (int t = 1; t <= config.max_iters; ++t) {
    theta_prev = theta;
    w = config.algorithm == Algorithm::Gap
            ? gap_step(theta, problem.y, config.alpha, problem.op)
            : ait_step(theta, problem.y, config.alpha, problem.op);
    if (config.algorithm == Algorithm::Gap && w.allFinite()) {
      const Eigen::VectorXd lhs = problem.op.apply(w);
      const Eigen::VectorXd rhs = config.alpha * problem.y +
                                  (1.0 - config.alpha) * problem.op.apply(theta);
      trace.max_consistency_residual =
          std::max(trace.max_consistency_residual,
                   (lhs - rhs).norm() / consistency_scale);
    }
    const double lambda = select_lambda(w, config.m_star);
    theta = shrink(w, lambda);
    if (lambda > 0.0) {
      double min_abs_on_support = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i)
        if (theta[i] != 0.0)
          min_abs_on_support = std::min(min_abs_on_support, std::abs(w[i]));
      if (std::isfinite(min_abs_on_support)) {
        trace.max_threshold_excess = std::max(
            trace.max_threshold_excess, lambda - min_abs_on_support);
      }
    }
    record(w, theta, lambda);
    trace.iterations_run = t;

    const bool finite = w.allFinite() && theta.allFinite();
    const double guard = tracked ? trace.err_w.back() : w.squaredNorm();
    if (!finite || guard > 1e12) {
      trace.stop_reason = StopReason::Diverged;
      break;
    }
    if (config.stop_err && trace.err_w.back() < *config.stop_err) {
      trace.stop_reason = StopReason::ErrorTarget;
      trace.converged = true;
      break;
    }
    if ((w - w_prev).squaredNorm() < config.stop_epsilon) {
      trace.stop_reason = StopReason::IterateChange;
      trace.converged = true;
      break;
    }
    w_prev = w;
  }
  trace.final_w = w;
  trace.final_theta = theta;
  trace.prev_theta = theta_prev;
  return trace;
}

/// Per-iteration trace export: iter, err_w, err_theta, lambda, support_size.
inline void write_trace_csv(const IterateTrace& trace,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << "iter,err_w,err_theta,lambda,support_size\n";
  const std::size_t rows = trace.lambda.size();
  for (std::size_t t = 0; t < rows; ++t) {
    out << t << ','
        << format_double(t < trace.err_w.size()
                             ? trace.err_w[t]
                             : std::numeric_limits<double>::quiet_NaN())
        << ','
        << format_double(t < trace.err_theta.size()
                             ? trace.err_theta[t]
                             : std::numeric_limits<double>::quiet_NaN())
        << ',' << format_double(trace.lambda[t]) << ','
        << trace.support[t].size() << '\n';
  }
}

/// One vector as a single-column CSV.
inline void write_vector_csv(const Eigen::VectorXd& v,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << "value\n";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << format_double(v[i]) << '\n';
}

}  // namespace gapcs
