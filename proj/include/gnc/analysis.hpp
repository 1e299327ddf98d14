#pragma once

// Asymptotic overhead analysis. gamma_upper(a, x) is the upper incomplete
// gamma function at integer order, (a-1)! e^{-x} sum_{i=0}^{a-1} x^i/i!, so
// gamma_upper(a, x) / (a-1)! is the probability that a Poisson(x) variable is
// at most a-1. The decodable-generation fraction evolves under fp_map and the
// scheme is feasible when the map dominates the identity on (x0, 1-delta).

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gnc/degree_distribution.hpp"

namespace gnc {

inline double gamma_upper(int alpha, double x) {
  if (alpha < 1) throw std::domain_error("gamma_upper requires alpha >= 1");
  if (!(x >= 0.0)) throw std::domain_error("gamma_upper requires x >= 0");
  if (x == 0.0) return std::tgamma(static_cast<double>(alpha));
  if (alpha <= 20 && x <= 30.0) {
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < alpha; ++i) {
      term *= x / static_cast<double>(i);
      sum += term;
    }
    return std::tgamma(static_cast<double>(alpha)) * std::exp(-x) * sum;
  }
  // Log-domain combination for large x or alpha: the partial sums are run in
  // linear space with periodic rescaling (sum_{i<alpha} x^i/i! alone would
  // overflow), and e^{-x} and (alpha-1)! enter through one exp at the end.
  double term = 1.0;
  double sum = 1.0;
  double log_shift = 0.0;
  for (int i = 1; i < alpha; ++i) {
    term *= x / static_cast<double>(i);
    sum += term;
    if (sum > 1e280) {
      sum *= 1e-280;
      term *= 1e-280;
      log_shift += 280.0 * 2.302585092994046;  // ln(10^280)
    }
  }
  return std::exp(std::lgamma(static_cast<double>(alpha)) - x + log_shift + std::log(sum));
}

/// Inverse of gamma_upper(alpha, .) on [0, inf): strictly decreasing from
/// (alpha-1)! to 0. Bracketing bisection polished with safeguarded Newton.
inline double gamma_inv(int alpha, double y) {
  const double fact = std::tgamma(static_cast<double>(alpha));
  if (!(y > 0.0) || y > fact * (1.0 + 1e-12))
    throw std::domain_error("gamma_inv requires y in (0, (alpha-1)!]");
  if (y >= fact) return 0.0;

  double lo = 0.0;
  double hi = static_cast<double>(alpha) + 40.0 * std::sqrt(static_cast<double>(alpha));
  while (gamma_upper(alpha, hi) > y) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("gamma_inv bracket expansion failed");
  }

  const double tol_val = 1e-9 * fact;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = gamma_upper(alpha, x);
    if (f > y)
      lo = x;
    else
      hi = x;
    if (hi - lo < 1e-11 * std::max(1.0, lo) && std::abs(f - y) <= tol_val) break;
    // Newton step on f(x) - y with f'(x) = -e^{-x} x^{alpha-1}.
    const double lderiv = -x + static_cast<double>(alpha - 1) * std::log(x);
    double next = std::numeric_limits<double>::quiet_NaN();
    if (lderiv > -700.0) {
      const double deriv = -std::exp(lderiv);
      next = x - (f - y) / deriv;
    }
    x = (std::isfinite(next) && next > lo && next < hi) ? next : 0.5 * (lo + hi);
  }
  return x;
}

struct AsymptoticParams {
  int g = 25;
  double R = 0.9;
  double delta = 0.02;
  DegreeDistribution dist = DegreeDistribution::single(2);
  double r0 = 0.0;
  double x0 = 0.0;  // 1 - gamma_upper(g, r0) / (g-1)!
};

/// Derive the x0 consistent with r0 (the fraction decodable with no outer-code help).
inline AsymptoticParams make_asymptotic_params(int g, double R, double delta,
                                               const DegreeDistribution& dist, double r0) {
  AsymptoticParams p;
  p.g = g;
  p.R = R;
  p.delta = delta;
  p.dist = dist;
  p.r0 = r0;
  p.x0 = 1.0 - gamma_upper(g, r0) / std::tgamma(static_cast<double>(g));
  return p;
}

/// Expected decodable fraction after one outer-code round, given fraction x.
inline double fp_map(double x, const AsymptoticParams& p) {
  const double intensity = p.r0 + static_cast<double>(p.g) * (1.0 - p.R) * p.dist.deriv(x);
  return 1.0 - gamma_upper(p.g, intensity) / std::tgamma(static_cast<double>(p.g));
}

struct AnalysisResult {
  bool feasible = false;
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double r0 = 0.0;
  double x0 = 0.0;
  double margin = 0.0;                // min over the grid of fp_map(x) - x
  std::vector<double> trajectory;     // fixed-point iterates from x = 0
};

inline double overhead_from_r0(double r0, int g, double delta, double R) {
  return r0 / (static_cast<double>(g) * (1.0 - delta) * R) - 1.0;
}

inline AnalysisResult check_convergence(const AsymptoticParams& p, double grid_step) {
  if (!(grid_step > 0.0) || grid_step > 1e-3 + 1e-15)
    throw std::invalid_argument("grid_step must lie in (0, 1e-3]");
  if (!(p.x0 > 0.0 && p.x0 < 1.0 - p.delta))
    throw std::domain_error("invalid interval: need 0 < x0 < 1 - delta");

  AnalysisResult res;
  res.r0 = p.r0;
  res.x0 = p.x0;
  res.margin = std::numeric_limits<double>::infinity();
  // Closed grid over [x0, 1-delta]: lattice points plus both endpoints, with
  // the strict inequality required everywhere.
  const double upper = 1.0 - p.delta;
  double last = -1.0;
  for (std::uint64_t k = 0;; ++k) {
    const double x = p.x0 + static_cast<double>(k) * grid_step;
    if (x > upper + 1e-15) break;
    last = std::min(x, upper);
    const double m = fp_map(last, p) - last;
    if (m < res.margin) res.margin = m;
  }
  if (last < upper - 1e-15) {
    const double m = fp_map(upper, p) - upper;
    if (m < res.margin) res.margin = m;
  }
  res.feasible = res.margin > 0.0;
  if (res.feasible) res.epsilon = overhead_from_r0(p.r0, p.g, p.delta, p.R);

  double x = 0.0;
  res.trajectory.push_back(x);
  for (int t = 0; t < 10000; ++t) {
    const double next = fp_map(x, p);
    res.trajectory.push_back(next);
    if (std::abs(next - x) < 1e-12) break;
    x = next;
  }
  return res;
}

struct MinR0Result {
  double r0 = 0.0;
  double x0 = 0.0;
  double epsilon = 0.0;
};

/// Feasibility of a fixed distribution at intensity r0; x0 at or beyond
/// 1 - delta means the condition interval is empty (vacuously feasible).
inline bool feasible_at_r0(const DegreeDistribution& dist, int g, double R, double delta,
                           double r0, double grid_step) {
  if (!(r0 > 0.0)) return false;
  const double x0 = 1.0 - gamma_upper(g, r0) / std::tgamma(static_cast<double>(g));
  if (x0 <= 0.0) return false;
  if (x0 >= 1.0 - delta) return true;
  return check_convergence(make_asymptotic_params(g, R, delta, dist, r0), grid_step).feasible;
}

/// Smallest feasible r0 for the distribution, to tolerance 1e-4, or nullopt
/// when even r0 = 11 g fails.
inline std::optional<MinR0Result> min_r0(const DegreeDistribution& dist, int g, double R,
                                         double delta, double grid_step) {
  double hi = 11.0 * static_cast<double>(g);
  if (!feasible_at_r0(dist, g, R, delta, hi, grid_step)) return std::nullopt;
  double lo = 0.0;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at_r0(dist, g, R, delta, mid, grid_step))
      hi = mid;
    else
      lo = mid;
  }
  // Monotonicity spot check: anything above the minimum must stay feasible.
  if (!feasible_at_r0(dist, g, R, delta, hi + 0.5, grid_step))
    throw std::logic_error("feasibility is not monotone in r0");
  MinR0Result out;
  out.r0 = hi;
  out.x0 = 1.0 - gamma_upper(g, hi) / std::tgamma(static_cast<double>(g));
  out.epsilon = overhead_from_r0(hi, g, delta, R);
  return out;
}

}  // namespace gnc
