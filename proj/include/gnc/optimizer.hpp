#pragma once

// Degree-distribution and rate design. At fixed (g, R, delta, r0) the
// convergence condition at a grid point x_j is linear in the p_i:
//
//   g (1-R) sum_i i p_i x_j^{i-1}  >=  gamma_inv(g, (g-1)!(1-x_j)) - r0 + slack
//
// so a distribution exists iff a linear feasibility program does. We decide it
// exactly (to the slack tolerance) by minimizing the maximum violation with a
// two-phase simplex, adding grid constraints lazily, and wrap that in a
// bisection on r0 and a grid sweep over (R, delta).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gnc/analysis.hpp"
#include "gnc/degree_distribution.hpp"

namespace gnc {

namespace detail {

// Dense two-phase simplex for: minimize c.z  s.t.  E z = f, z >= 0.
// Bland's rule; rows are sign-normalized so f >= 0.
class Simplex {
 public:
  enum class Status { optimal, infeasible, unbounded, stalled };

  Status solve(std::vector<std::vector<double>> e, std::vector<double> f, std::vector<double> c,
               std::vector<double>& z_out, double& obj_out) {
    const std::size_t m = e.size();
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < m; ++i) {
      if (f[i] < 0.0) {
        f[i] = -f[i];
        for (auto& v : e[i]) v = -v;
      }
    }
    // Tableau with artificial columns n..n+m-1 and rhs column n+m.
    const std::size_t cols = n + m + 1;
    tab_.assign(m, std::vector<double>(cols, 0.0));
    basis_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::copy(e[i].begin(), e[i].end(), tab_[i].begin());
      tab_[i][n + i] = 1.0;
      tab_[i][cols - 1] = f[i];
      basis_[i] = n + i;
    }

    // Phase 1: minimize the sum of artificials.
    std::vector<double> phase1(cols - 1, 0.0);
    for (std::size_t j = n; j < n + m; ++j) phase1[j] = 1.0;
    if (!run(phase1, n + m)) return Status::stalled;
    if (objective(phase1) > 1e-9) return Status::infeasible;
    for (std::size_t i = 0; i < m; ++i) {
      if (basis_[i] >= n) {
        // Degenerate artificial still basic: pivot it out on any usable column.
        for (std::size_t j = 0; j < n; ++j) {
          if (std::abs(tab_[i][j]) > 1e-9) {
            pivot(i, j);
            break;
          }
        }
      }
    }

    // Phase 2 over the original costs; artificials are barred from entering.
    std::vector<double> full_cost(cols - 1, 0.0);
    std::copy(c.begin(), c.end(), full_cost.begin());
    if (!run(full_cost, n)) return Status::stalled;
    z_out.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (basis_[i] < n) z_out[basis_[i]] = tab_[i].back();
    obj_out = objective(full_cost);
    return Status::optimal;
  }

 private:
  // Price out the current basis and pivot until no reduced cost is negative.
  // Only columns < allowed may enter.
  bool run(const std::vector<double>& cost, std::size_t allowed) {
    const std::size_t m = tab_.size();
    for (int iter = 0; iter < 20000; ++iter) {
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        if (reduced_cost(cost, j) < -1e-11) {
          enter = j;
          break;  // Bland: smallest index
        }
      }
      if (enter == allowed) return true;
      std::size_t leave = m;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (tab_[i][enter] > 1e-11) {
          const double ratio = tab_[i].back() / tab_[i][enter];
          if (leave == m || ratio < best_ratio - 1e-15 ||
              (ratio < best_ratio + 1e-15 && basis_[i] < basis_[leave])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave == m) return false;  // unbounded direction
      pivot(leave, enter);
    }
    return false;
  }

  double reduced_cost(const std::vector<double>& cost, std::size_t j) const {
    double r = cost[j];
    for (std::size_t i = 0; i < tab_.size(); ++i) r -= cost[basis_[i]] * tab_[i][j];
    return r;
  }

  double objective(const std::vector<double>& cost) const {
    double v = 0.0;
    for (std::size_t i = 0; i < tab_.size(); ++i) v += cost[basis_[i]] * tab_[i].back();
    return v;
  }

  void pivot(std::size_t row, std::size_t col) {
    auto& prow = tab_[row];
    const double inv = 1.0 / prow[col];
    for (auto& v : prow) v *= inv;
    for (std::size_t i = 0; i < tab_.size(); ++i) {
      if (i == row) continue;
      const double factor = tab_[i][col];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < prow.size(); ++j) tab_[i][j] -= factor * prow[j];
    }
    basis_[row] = col;
  }

  std::vector<std::vector<double>> tab_;
  std::vector<std::size_t> basis_;
};

// Minimize max_j (c_j - a_j . p) over the probability simplex, restricted to
// constraint subset S. Returns (p, t*).
inline bool minmax_over_simplex(const std::vector<std::vector<double>>& a,
                                const std::vector<double>& c, const std::vector<std::size_t>& subset,
                                std::size_t dim, std::vector<double>& p_out, double& t_out) {
  const std::size_t rows = subset.size() + 1;
  const std::size_t n = dim + 2 + subset.size();  // p, u, v, surplus per subset row
  std::vector<std::vector<double>> e(rows, std::vector<double>(n, 0.0));
  std::vector<double> f(rows, 0.0);
  std::vector<double> cost(n, 0.0);
  for (std::size_t r = 0; r < subset.size(); ++r) {
    const std::size_t j = subset[r];
    for (std::size_t i = 0; i < dim; ++i) e[r][i] = a[j][i];
    e[r][dim] = 1.0;        // u
    e[r][dim + 1] = -1.0;   // v
    e[r][dim + 2 + r] = -1.0;  // surplus: a.p + u - v - s = c_j
    f[r] = c[j];
  }
  for (std::size_t i = 0; i < dim; ++i) e[rows - 1][i] = 1.0;
  f[rows - 1] = 1.0;
  cost[dim] = 1.0;
  cost[dim + 1] = -1.0;

  Simplex lp;
  std::vector<double> z;
  double obj = 0.0;
  const auto status = lp.solve(std::move(e), std::move(f), std::move(cost), z, obj);
  if (status != Simplex::Status::optimal) return false;
  p_out.assign(z.begin(), z.begin() + dim);
  t_out = obj;
  return true;
}

inline DegreeDistribution distribution_from_weights(const std::vector<double>& p) {
  std::vector<DegreeDistribution::Term> terms;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::max(p[i], 0.0);
  if (sum <= 0.0) throw std::logic_error("degenerate LP weight vector");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double w = std::max(p[i], 0.0) / sum;
    if (w > 1e-12) {
      terms.emplace_back(static_cast<std::uint32_t>(i + 2), w);
      acc += w;
    }
  }
  // Absorb rounding residue into the heaviest term so the total is exactly 1.
  std::size_t heaviest = 0;
  for (std::size_t i = 1; i < terms.size(); ++i)
    if (terms[i].second > terms[heaviest].second) heaviest = i;
  terms[heaviest].second += 1.0 - acc;
  return DegreeDistribution(terms);
}

}  // namespace detail

/// Decide whether some degree distribution with support {2..D} satisfies the
/// convergence condition on every grid point, and return one if so.
inline std::optional<DegreeDistribution> lp_feasible(int g, double R, double delta, double r0,
                                                     int D, std::span<const double> x_grid,
                                                     double slack = 1e-9) {
  if (D < 2) throw std::invalid_argument("D must be at least 2");
  const double fact = std::tgamma(static_cast<double>(g));
  const double scale = static_cast<double>(g) * (1.0 - R);

  // Constraints with a nonpositive requirement are satisfied by any p >= 0.
  std::vector<std::vector<double>> a;
  std::vector<double> c;
  const std::size_t dim = static_cast<std::size_t>(D - 1);
  for (double x : x_grid) {
    const double need = gamma_inv(g, fact * (1.0 - x)) - r0 + slack;
    if (need <= 0.0) continue;
    if (scale <= 0.0) return std::nullopt;  // R = 1 cannot meet a positive requirement
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const double degree = static_cast<double>(i + 2);
      row[i] = degree * std::pow(x, degree - 1.0);
    }
    a.push_back(std::move(row));
    c.push_back(need / scale);
  }
  if (a.empty()) return DegreeDistribution::single(2);

  // Lazy constraint generation: solve on a growing subset, verify on all.
  std::vector<std::size_t> subset;
  {
    std::size_t worst = 0;
    for (std::size_t j = 1; j < c.size(); ++j)
      if (c[j] > c[worst]) worst = j;
    subset.push_back(worst);
  }
  std::vector<double> p;
  for (int round = 0; round < 400; ++round) {
    double t = 0.0;
    if (!detail::minmax_over_simplex(a, c, subset, dim, p, t))
      throw std::runtime_error("LP subproblem did not converge");
    if (t > 1e-12) return std::nullopt;  // even the subset cannot be satisfied

    std::vector<std::pair<double, std::size_t>> violations;
    for (std::size_t j = 0; j < a.size(); ++j) {
      double lhs = 0.0;
      for (std::size_t i = 0; i < dim; ++i) lhs += a[j][i] * p[i];
      const double v = c[j] - lhs;
      if (v > 1e-12) violations.emplace_back(v, j);
    }
    if (violations.empty()) return detail::distribution_from_weights(p);
    std::sort(violations.begin(), violations.end(),
              [](const auto& lhs, const auto& rhs) { return lhs.first > rhs.first; });
    const std::size_t add = std::min<std::size_t>(violations.size(), 8);
    for (std::size_t k = 0; k < add; ++k) subset.push_back(violations[k].second);
  }
  throw std::runtime_error("constraint generation did not converge");
}

struct GridRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  std::vector<double> values() const {
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("grid range must have positive step and hi >= lo");
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
    return out;
  }
};

struct OptimizerConfig {
  int g = 25;
  int D = 15;
  GridRange R_grid{0.65, 0.995, 0.005};
  GridRange delta_grid{0.005, 0.05, 0.005};
  double x_grid_step = 1e-3;
  double r0_tolerance = 1e-4;
  double slack = 1e-9;
  int threads = 1;
};

struct OptimizedDesign {
  double epsilon = 0.0;
  double R = 0.0;
  double delta = 0.0;
  double r0 = 0.0;
  double x0 = 0.0;
  DegreeDistribution dist = DegreeDistribution::single(2);
};

namespace detail {

struct CellResult {
  bool feasible = false;
  double epsilon = std::numeric_limits<double>::infinity();
  double r0 = 0.0;
  std::optional<DegreeDistribution> dist;
};

inline std::vector<double> constraint_grid(double x0, double upper, double step) {
  std::vector<double> grid;
  for (std::uint64_t k = 1;; ++k) {
    const double x = x0 + static_cast<double>(k) * step;
    if (x > upper + 1e-15) break;
    grid.push_back(std::min(x, upper));
  }
  if (grid.empty() || grid.back() < upper - 1e-15) grid.push_back(upper);
  return grid;
}

// Largest derivative any distribution with support {2..D} can reach at x.
inline double max_deriv(int D, double x) {
  double best = 0.0;
  for (int i = 2; i <= D; ++i) {
    const double v = static_cast<double>(i) * std::pow(x, static_cast<double>(i - 1));
    if (v > best) best = v;
  }
  return best;
}

// LP feasibility at one (g, R, delta, r0) probe; vacuous when x0 >= 1 - delta.
inline std::optional<DegreeDistribution> probe(int g, double R, double delta, double r0, int D,
                                               double x_step, double slack) {
  if (!(r0 > 0.0)) return std::nullopt;
  const double x0 = 1.0 - gamma_upper(g, r0) / std::tgamma(static_cast<double>(g));
  if (x0 <= 0.0) return std::nullopt;
  if (x0 >= 1.0 - delta) return DegreeDistribution::single(2);
  const auto grid = constraint_grid(x0, 1.0 - delta, x_step);
  if (grid.empty()) return DegreeDistribution::single(2);
  // Pointwise necessary condition: even all mass on the best single degree
  // must clear each grid point before the coupled LP can.
  const double fact = std::tgamma(static_cast<double>(g));
  const double scale = static_cast<double>(g) * (1.0 - R);
  for (double x : grid) {
    const double need = gamma_inv(g, fact * (1.0 - x)) - r0 + slack;
    if (need > 0.0 && scale * max_deriv(D, x) < need) return std::nullopt;
  }
  return lp_feasible(g, R, delta, r0, D, grid, slack);
}

inline CellResult optimize_cell(const OptimizerConfig& cfg, double R, double delta) {
  CellResult out;
  double hi = 11.0 * static_cast<double>(cfg.g);
  auto at_hi = probe(cfg.g, R, delta, hi, cfg.D, cfg.x_grid_step, cfg.slack);
  if (!at_hi) return out;
  std::optional<DegreeDistribution> best = std::move(at_hi);
  // Necessary bound from the interval endpoint tightens the bracket.
  const double fact = std::tgamma(static_cast<double>(cfg.g));
  double lo = gamma_inv(cfg.g, fact * delta) -
              static_cast<double>(cfg.g) * (1.0 - R) * max_deriv(cfg.D, 1.0 - delta);
  lo = std::min(std::max(lo, 0.0), hi);
  while (hi - lo > cfg.r0_tolerance) {
    const double mid = 0.5 * (lo + hi);
    auto d = probe(cfg.g, R, delta, mid, cfg.D, cfg.x_grid_step, cfg.slack);
    if (d) {
      hi = mid;
      best = std::move(d);
    } else {
      lo = mid;
    }
  }
  // Feasibility must be monotone in r0; a violation invalidates the search.
  if (!probe(cfg.g, R, delta, hi + 0.5, cfg.D, cfg.x_grid_step, cfg.slack))
    throw std::logic_error("lp feasibility is not monotone in r0");
  out.feasible = true;
  out.r0 = hi;
  out.epsilon = overhead_from_r0(hi, cfg.g, delta, R);
  out.dist = std::move(best);
  return out;
}

}  // namespace detail

/// Sweep the (R, delta) grid, bisect the minimal feasible r0 per cell, and
/// return the design with the smallest predicted overhead. Deterministic for
/// a given config and independent of the thread count.
inline std::optional<OptimizedDesign> optimize_design(const OptimizerConfig& cfg) {
  const auto r_values = cfg.R_grid.values();
  const auto d_values = cfg.delta_grid.values();
  struct Cell {
    double R, delta;
  };
  std::vector<Cell> cells;
  for (double R : r_values)
    for (double delta : d_values) cells.push_back({R, delta});

  std::vector<detail::CellResult> results(cells.size());
  const int workers = std::max(1, cfg.threads);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      results[idx] = detail::optimize_cell(cfg, cells[idx].R, cells[idx].delta);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::size_t best = cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!results[i].feasible) continue;
    if (best == cells.size() || results[i].epsilon < results[best].epsilon) best = i;
  }
  if (best == cells.size()) return std::nullopt;

  OptimizedDesign design;
  design.R = cells[best].R;
  design.delta = cells[best].delta;
  design.r0 = results[best].r0;
  design.dist = *results[best].dist;
  // Nudge r0 upward until the design verifies on the finer default analysis
  // grid; the LP grid is coarser and can leave hairline violations between
  // its points.
  const double polish_step = std::max(cfg.r0_tolerance, 1e-4);
  for (int i = 0; i < 1000; ++i) {
    const double x0 = 1.0 - gamma_upper(cfg.g, design.r0) / std::tgamma(static_cast<double>(cfg.g));
    if (x0 >= 1.0 - design.delta) break;
    if (x0 > 0.0 &&
        check_convergence(make_asymptotic_params(cfg.g, design.R, design.delta, design.dist, design.r0),
                          1e-4)
            .feasible)
      break;
    design.r0 += polish_step;
  }
  design.x0 = 1.0 - gamma_upper(cfg.g, design.r0) / std::tgamma(static_cast<double>(cfg.g));
  design.epsilon = overhead_from_r0(design.r0, cfg.g, design.delta, design.R);
  return design;
}

}  // namespace gnc
