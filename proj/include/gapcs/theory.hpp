#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gapcs/errors.hpp"
#include "gapcs/problem.hpp"
#include "gapcs/solver.hpp"

namespace gapcs {

/// Inputs shared by every closed-form condition: the RIP constant
/// delta = delta_{m*+K}, the support budget and sparsity, the eigenvalue
/// extremes of AA^T, the step-size and the squared noise norm.
struct TheoryInputs {
  double delta = 0.0;
  int m_star = 1;
  int k = 1;
  double e_max = 1.0;
  double e_min = 1.0;
  double alpha = 1.0;
  double noise_norm_sq = 0.0;
};

enum class TheoremId {
  GapNoiseless,
  GapNoisy,
  AitNoiselessA,
  AitNoiselessB,
  AitNoisyA,
  AitNoisyB,
};

inline const char* to_string(TheoremId id) {
  switch (id) {
    case TheoremId::GapNoiseless: return "gap_noiseless";
    case TheoremId::GapNoisy: return "gap_noisy";
    case TheoremId::AitNoiselessA: return "ait_noiseless_a";
    case TheoremId::AitNoiselessB: return "ait_noiseless_b";
    case TheoremId::AitNoisyA: return "ait_noisy_a";
    case TheoremId::AitNoisyB: return "ait_noisy_b";
  }
  return "unknown";
}

enum class AitBranch { A, B };

/// Open admissible step-size interval (lo, hi).
struct AlphaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double alpha) const { return lo < alpha && alpha < hi; }
};

namespace detail {

inline void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1), got " +
                      std::to_string(delta));
  }
}

/// (c(1 - sqrt(rad)), c(1 + sqrt(rad))) when rad > 0, infeasible otherwise.
inline std::optional<AlphaInterval> centered_interval(double center,
                                                      double radicand) {
  if (!(radicand > 0.0)) return std::nullopt;
  const double r = std::sqrt(radicand);
  return AlphaInterval{center * (1.0 - r), center * (1.0 + r)};
}

}  // namespace detail

/// Rate of the projection iteration without noise:
/// gamma_1 = (4 + 2 m*) [1 + (alpha^2 - 2 alpha)(1 - delta)/e_max].
inline double gamma_gap_noiseless(const TheoryInputs& in) {
  detail::require_delta(in.delta);
  if (!(in.alpha > 0.0 && in.alpha < 2.0)) {
    throw DomainError("gamma_gap_noiseless: alpha must lie in (0, 2)");
  }
  const double f = 4.0 + 2.0 * in.m_star;
  return f * (1.0 + (in.alpha * in.alpha - 2.0 * in.alpha) * (1.0 - in.delta) /
                        in.e_max);
}

/// Noisy rate gamma_2 (factor 8 + 4 m*) and the noise floor
/// 2 alpha^2 ||eps||^2 / e_min.
inline std::pair<double, double> gamma_gap_noisy(const TheoryInputs& in) {
  detail::require_delta(in.delta);
  if (!(in.alpha > 0.0 && in.alpha < 2.0)) {
    throw DomainError("gamma_gap_noisy: alpha must lie in (0, 2)");
  }
  if (!(in.e_min > 0.0)) throw DomainError("gamma_gap_noisy: e_min must be > 0");
  const double f = 8.0 + 4.0 * in.m_star;
  const double gamma =
      f * (1.0 + (in.alpha * in.alpha - 2.0 * in.alpha) * (1.0 - in.delta) /
                     in.e_max);
  const double floor = 2.0 * in.alpha * in.alpha * in.noise_norm_sq / in.e_min;
  return {gamma, floor};
}

/// AIT rates. Branch A bounds the gradient term by (e_max)^2, branch B by
/// e_max (1 + delta); the noisy variants double the sparsity factor.
inline double gamma_ait(const TheoryInputs& in, AitBranch branch, bool noisy) {
  detail::require_delta(in.delta);
  if (!(in.alpha > 0.0)) throw DomainError("gamma_ait: alpha must be > 0");
  const double f = noisy ? 8.0 + 4.0 * in.m_star : 4.0 + 2.0 * in.m_star;
  const double quad = branch == AitBranch::A
                          ? in.e_max * in.e_max
                          : in.e_max * (1.0 + in.delta);
  return f * (1.0 + in.alpha * in.alpha * quad -
              2.0 * in.alpha * (1.0 - in.delta));
}

/// Noise floor of the noisy AIT bound: 2 alpha^2 e_max ||eps||^2.
inline double ait_error_bound(const TheoryInputs& in) {
  return 2.0 * in.alpha * in.alpha * in.e_max * in.noise_norm_sq;
}

/// Admissible step-size interval of the noiseless projection theorem:
/// 1 -+ sqrt(1 - e_max (3 + 2m*) / ((1 - delta)(4 + 2m*))).
inline std::optional<AlphaInterval> alpha_interval_gap_noiseless(
    const TheoryInputs& in) {
  if (!(in.delta > 0.0 && in.delta < 1.0)) return std::nullopt;
  const double f = 4.0 + 2.0 * in.m_star;
  const double radicand = 1.0 - in.e_max * (f - 1.0) / ((1.0 - in.delta) * f);
  return detail::centered_interval(1.0, radicand);
}

/// Noisy analogue with the (7 + 4m*)/(8 + 4m*) ratio.
inline std::optional<AlphaInterval> alpha_interval_gap_noisy(
    const TheoryInputs& in) {
  if (!(in.delta > 0.0 && in.delta < 1.0)) return std::nullopt;
  const double f = 8.0 + 4.0 * in.m_star;
  const double radicand = 1.0 - in.e_max * (f - 1.0) / ((1.0 - in.delta) * f);
  return detail::centered_interval(1.0, radicand);
}

/// AIT step-size intervals, centered at (1-delta)/e_max^2 (branch A) or
/// (1-delta)/(e_max (1+delta)) (branch B). Each interval is exactly the
/// sublevel set where the matching rate constant stays below 1.
inline std::optional<AlphaInterval> alpha_interval_ait(const TheoryInputs& in,
                                                       AitBranch branch,
                                                       bool noisy) {
  if (!(in.delta > 0.0 && in.delta < 1.0)) return std::nullopt;
  const double f = noisy ? 8.0 + 4.0 * in.m_star : 4.0 + 2.0 * in.m_star;
  const double one_minus = 1.0 - in.delta;
  if (branch == AitBranch::A) {
    const double center = one_minus / (in.e_max * in.e_max);
    const double radicand =
        1.0 - (f - 1.0) * in.e_max * in.e_max / (f * one_minus * one_minus);
    return detail::centered_interval(center, radicand);
  }
  const double center = one_minus / (in.e_max * (1.0 + in.delta));
  const double radicand = 1.0 - (f - 1.0) * (1.0 + in.delta) * in.e_max /
                                    (f * one_minus * one_minus);
  return detail::centered_interval(center, radicand);
}

/// The six best-achievable rates and their optimizing step-sizes.
struct OptimalRates {
  double gamma1 = 0.0, gamma2 = 0.0;  // projection, alpha* = 1
  double gamma3 = 0.0, gamma5 = 0.0;  // AIT branch A, alpha* = (1-d)/e^2
  double gamma4 = 0.0, gamma6 = 0.0;  // AIT branch B, alpha* = (1-d)/(e(1+d))
  double alpha_gap = 1.0;
  double alpha_ait_a = 0.0;
  double alpha_ait_b = 0.0;
};

inline OptimalRates optimal_rates(const TheoryInputs& in) {
  detail::require_delta(in.delta);
  if (!(in.e_max > 0.0)) throw DomainError("optimal_rates: e_max must be > 0");
  const double d = in.delta;
  const double e = in.e_max;
  const double f1 = 2.0 * in.m_star + 4.0;
  const double f2 = 4.0 * in.m_star + 8.0;
  OptimalRates out;
  out.alpha_gap = 1.0;
  out.alpha_ait_a = (1.0 - d) / (e * e);
  out.alpha_ait_b = (1.0 - d) / (e * (1.0 + d));
  out.gamma1 = f1 * (e - (1.0 - d)) / e;
  out.gamma2 = f2 * (e - (1.0 - d)) / e;
  out.gamma3 = f1 * (e * e - (1.0 - d) * (1.0 - d)) / (e * e);
  out.gamma5 = f2 * (e * e - (1.0 - d) * (1.0 - d)) / (e * e);
  out.gamma4 = f1 * (e * (1.0 + d) - (1.0 - d) * (1.0 - d)) / (e * (1.0 + d));
  out.gamma6 = f2 * (e * (1.0 + d) - (1.0 - d) * (1.0 - d)) / (e * (1.0 + d));
  return out;
}

/// Upper bound on delta required by a theorem's RIP hypothesis.
inline double delta_bound(TheoremId id, int m_star, double e_max) {
  const double f1 = 2.0 * m_star + 4.0;
  const double f2 = 4.0 * m_star + 8.0;
  switch (id) {
    case TheoremId::GapNoiseless: return 1.0 - e_max * (f1 - 1.0) / f1;
    case TheoremId::GapNoisy: return 1.0 - e_max * (f2 - 1.0) / f2;
    case TheoremId::AitNoiselessA:
      return 1.0 - e_max * std::sqrt((f1 - 1.0) / f1);
    case TheoremId::AitNoiselessB: return 1.0 / (f1 - 1.0);
    case TheoremId::AitNoisyA:
      return 1.0 - e_max * std::sqrt((f2 - 1.0) / f2);
    case TheoremId::AitNoisyB: return 1.0 / (f2 - 1.0);
  }
  return 0.0;
}

/// Upper bound on e_max required by a theorem.
inline double e_max_bound(TheoremId id, int m_star) {
  const double f1 = 2.0 * m_star + 4.0;
  const double f2 = 4.0 * m_star + 8.0;
  switch (id) {
    case TheoremId::GapNoiseless: return f1 / (f1 - 1.0);
    case TheoremId::GapNoisy: return f2 / (f2 - 1.0);
    case TheoremId::AitNoiselessA: return std::sqrt(f1 / (f1 - 1.0));
    case TheoremId::AitNoiselessB: return f1 / (f1 - 1.0);
    case TheoremId::AitNoisyA: return std::sqrt(f2 / (f2 - 1.0));
    case TheoremId::AitNoisyB: return f2 / (f2 - 1.0);
  }
  return 0.0;
}

inline std::optional<AlphaInterval> alpha_interval(TheoremId id,
                                                   const TheoryInputs& in) {
  switch (id) {
    case TheoremId::GapNoiseless: return alpha_interval_gap_noiseless(in);
    case TheoremId::GapNoisy: return alpha_interval_gap_noisy(in);
    case TheoremId::AitNoiselessA:
      return alpha_interval_ait(in, AitBranch::A, false);
    case TheoremId::AitNoiselessB:
      return alpha_interval_ait(in, AitBranch::B, false);
    case TheoremId::AitNoisyA:
      return alpha_interval_ait(in, AitBranch::A, true);
    case TheoremId::AitNoisyB:
      return alpha_interval_ait(in, AitBranch::B, true);
  }
  return std::nullopt;
}

/// Rate constant at the inputs' alpha; NaN when the formula's domain does not
/// admit the inputs (the report still records which hypothesis failed).
inline double gamma_at(TheoremId id, const TheoryInputs& in) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!(in.delta > 0.0 && in.delta < 1.0)) return nan;
  switch (id) {
    case TheoremId::GapNoiseless:
      return (in.alpha > 0.0 && in.alpha < 2.0) ? gamma_gap_noiseless(in) : nan;
    case TheoremId::GapNoisy:
      return (in.alpha > 0.0 && in.alpha < 2.0 && in.e_min > 0.0)
                 ? gamma_gap_noisy(in).first
                 : nan;
    case TheoremId::AitNoiselessA:
      return in.alpha > 0.0 ? gamma_ait(in, AitBranch::A, false) : nan;
    case TheoremId::AitNoiselessB:
      return in.alpha > 0.0 ? gamma_ait(in, AitBranch::B, false) : nan;
    case TheoremId::AitNoisyA:
      return in.alpha > 0.0 ? gamma_ait(in, AitBranch::A, true) : nan;
    case TheoremId::AitNoisyB:
      return in.alpha > 0.0 ? gamma_ait(in, AitBranch::B, true) : nan;
  }
  return nan;
}

/// Verdicts for one theorem at the given inputs. hypotheses_hold is true only
/// when the delta bound, the e_max bound and strict alpha-membership all hold.
struct TheoryReport {
  TheoremId theorem = TheoremId::GapNoiseless;
  TheoryInputs inputs;
  bool delta_ok = false;
  bool e_max_ok = false;
  bool alpha_ok = false;
  bool hypotheses_hold = false;
  std::optional<AlphaInterval> interval;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double gamma_star = std::numeric_limits<double>::quiet_NaN();
  double alpha_star = std::numeric_limits<double>::quiet_NaN();
  double error_bound = 0.0;       // noisy theorems only
  bool floor_unreliable = false;  // GAP noisy with e_min << e_max
};

inline TheoryReport evaluate_theorem(TheoremId id, const TheoryInputs& in) {
  TheoryReport r;
  r.theorem = id;
  r.inputs = in;
  r.delta_ok = in.delta > 0.0 && in.delta < delta_bound(id, in.m_star, in.e_max);
  r.e_max_ok = in.e_max < e_max_bound(id, in.m_star);
  r.interval = alpha_interval(id, in);
  r.alpha_ok = r.interval.has_value() && r.interval->contains(in.alpha);
  r.hypotheses_hold = r.delta_ok && r.e_max_ok && r.alpha_ok;
  r.gamma = gamma_at(id, in);
  if (in.delta > 0.0 && in.delta < 1.0 && in.e_max > 0.0) {
    const OptimalRates opt = optimal_rates(in);
    switch (id) {
      case TheoremId::GapNoiseless:
        r.gamma_star = opt.gamma1; r.alpha_star = opt.alpha_gap; break;
      case TheoremId::GapNoisy:
        r.gamma_star = opt.gamma2; r.alpha_star = opt.alpha_gap; break;
      case TheoremId::AitNoiselessA:
        r.gamma_star = opt.gamma3; r.alpha_star = opt.alpha_ait_a; break;
      case TheoremId::AitNoiselessB:
        r.gamma_star = opt.gamma4; r.alpha_star = opt.alpha_ait_b; break;
      case TheoremId::AitNoisyA:
        r.gamma_star = opt.gamma5; r.alpha_star = opt.alpha_ait_a; break;
      case TheoremId::AitNoisyB:
        r.gamma_star = opt.gamma6; r.alpha_star = opt.alpha_ait_b; break;
    }
  }
  if (id == TheoremId::GapNoisy) {
    r.error_bound = in.e_min > 0.0
                        ? 2.0 * in.alpha * in.alpha * in.noise_norm_sq / in.e_min
                        : std::numeric_limits<double>::infinity();
    r.floor_unreliable = in.e_min < 1e-6 * in.e_max;
  } else if (id == TheoremId::AitNoisyA || id == TheoremId::AitNoisyB) {
    r.error_bound = ait_error_bound(in);
  }
  return r;
}

/// One report per theorem applicable to the configured algorithm.
inline std::vector<TheoryReport> certify(const ProblemInstance& problem,
                                         const SolverConfig& config,
                                         double rip_delta) {
  if (config.m_star < problem.sparsity_k) {
    throw DomainError("certify: m_star must be >= the signal sparsity K");
  }
  TheoryInputs in;
  in.delta = rip_delta;
  in.m_star = config.m_star;
  in.k = problem.sparsity_k;
  in.e_max = problem.op.e_max();
  in.e_min = problem.op.e_min();
  in.alpha = config.alpha;
  in.noise_norm_sq = problem.noise.squaredNorm();
  std::vector<TheoryReport> reports;
  if (config.algorithm == Algorithm::Gap) {
    reports.push_back(evaluate_theorem(TheoremId::GapNoiseless, in));
    reports.push_back(evaluate_theorem(TheoremId::GapNoisy, in));
  } else {
    reports.push_back(evaluate_theorem(TheoremId::AitNoiselessA, in));
    reports.push_back(evaluate_theorem(TheoremId::AitNoiselessB, in));
    reports.push_back(evaluate_theorem(TheoremId::AitNoisyA, in));
    reports.push_back(evaluate_theorem(TheoremId::AitNoisyB, in));
  }
  return reports;
}

}  // namespace gapcs
