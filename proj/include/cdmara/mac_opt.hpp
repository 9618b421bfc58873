#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "cdmara/asymptotic.hpp"

namespace cdmara {

using MacVector = std::vector<double>;

struct MacEvaluation {
  double spectral_eff = -std::numeric_limits<double>::infinity();
  double eta = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
};

// Evaluates C for a candidate MAC vector. Overloaded multi-class
// decorrelator candidates are reported infeasible rather than thrown, so
// search loops can skip them.
inline MacEvaluation evaluate_mac(const SystemConfig& sys, const PowerProfile& profile,
                                  const MacVector& thetas, double tol = 1e-12) {
  const PowerProfile cand = profile.with_tx_probs(thetas);
  if (sys.receiver == Receiver::Decorrelator && profile.size() > 1 &&
      traffic_load(sys.alpha, cand) > 1.0)
    return {};
  const SirSolution sol = solve_sir(sys, cand, tol);
  return {spectral_efficiency(sys.alpha, cand, sol.eta), sol.eta, true};
}

struct SweepRow {
  MacVector thetas;
  double eta = std::numeric_limits<double>::quiet_NaN();
  double load = 0.0;
  double spectral_eff = std::numeric_limits<double>::quiet_NaN();
  bool feasible = false;
};

// Full Cartesian grid over [0,1]^M in lexicographic theta order.
inline std::vector<SweepRow> sweep_grid(const SystemConfig& sys, const PowerProfile& profile,
                                        double grid_step, double tol = 1e-12) {
  if (!(grid_step > 0.0 && grid_step <= 1.0))
    throw ConfigError("grid step must lie in (0,1]");
  const std::size_t m = profile.size();
  std::vector<double> axis;
  for (std::size_t i = 0;; ++i) {
    const double v = i * grid_step;
    if (v > 1.0 + 1e-12) break;
    axis.push_back(std::min(v, 1.0));
  }
  if (axis.back() < 1.0 - 1e-12) axis.push_back(1.0);

  double total = 1.0;
  for (std::size_t i = 0; i < m; ++i) total *= static_cast<double>(axis.size());
  if (total > 1e7)
    throw ConfigError("grid of " + std::to_string(total) + " points exceeds the 1e7 limit");

  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(m, 0);
  MacVector thetas(m);
  while (true) {
    for (std::size_t j = 0; j < m; ++j) thetas[j] = axis[idx[j]];
    SweepRow row;
    row.thetas = thetas;
    const PowerProfile cand = profile.with_tx_probs(thetas);
    row.load = traffic_load(sys.alpha, cand);
    const MacEvaluation ev = evaluate_mac(sys, profile, thetas, tol);
    row.feasible = ev.feasible;
    if (ev.feasible) {
      row.eta = ev.eta;
      row.spectral_eff = ev.spectral_eff;
    }
    rows.push_back(std::move(row));
    // odometer with the last component fastest => lexicographic row order
    std::size_t j = m;
    while (j > 0) {
      --j;
      if (++idx[j] < axis.size()) break;
      idx[j] = 0;
      if (j == 0) return rows;
    }
  }
}

// Exact ties keep the later (lexicographically larger) theta vector.
inline const SweepRow* grid_argmax(const std::vector<SweepRow>& rows) {
  const SweepRow* best = nullptr;
  for (const auto& r : rows) {
    if (!r.feasible) continue;
    if (!best || r.spectral_eff >= best->spectral_eff) best = &r;
  }
  return best;
}

struct OptimizeOptions {
  double grid_step = 0.1;
  double refine_tol = 1e-6;
  int max_rounds = 50;
  bool record_trace = false;
};

struct OptResult {
  MacVector theta_star;
  double c_star = 0.0;
  double eta_star = 0.0;
  long evaluations = 0;
  std::vector<std::pair<MacVector, double>> trace;
};

// Coarse grid seed followed by cyclic coordinate ascent; each coordinate is
// maximized by golden-section search on its feasible interval. The result is
// a local maximum guarded by the grid seed, not a global-optimality claim.
inline OptResult optimize_mac(const SystemConfig& sys, const PowerProfile& profile,
                              const OptimizeOptions& opts = {}) {
  const std::size_t m = profile.size();
  OptResult res;

  auto eval = [&](const MacVector& th) -> double {
    ++res.evaluations;
    return evaluate_mac(sys, profile, th).spectral_eff;
  };

  const auto grid = sweep_grid(sys, profile, opts.grid_step);
  const SweepRow* seed = grid_argmax(grid);
  if (!seed) throw DomainError("no feasible MAC point on the seed grid");
  res.evaluations += static_cast<long>(grid.size());

  MacVector theta = seed->thetas;
  double best_c = seed->spectral_eff;
  if (opts.record_trace) res.trace.emplace_back(theta, best_c);

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int round = 0; round < opts.max_rounds; ++round) {
    const double round_start = best_c;
    for (std::size_t j = 0; j < m; ++j) {
      // Feasible interval for this coordinate: for the multi-class
      // decorrelator the load constraint caps theta_j, otherwise [0,1].
      double hi = 1.0;
      if (sys.receiver == Receiver::Decorrelator && m > 1) {
        double other = 0.0;
        for (std::size_t i = 0; i < m; ++i)
          if (i != j) other += profile[i].fraction * theta[i];
        const double cap = (1.0 - sys.alpha * other) / (sys.alpha * profile[j].fraction);
        hi = std::max(0.0, std::min(1.0, cap));
      }
      auto g = [&](double t) {
        MacVector th = theta;
        th[j] = t;
        return eval(th);
      };
      double a = 0.0, b = hi;
      double c = b - invphi * (b - a);
      double d = a + invphi * (b - a);
      double fc = g(c), fd = g(d);
      while (b - a > opts.refine_tol) {
        if (fc > fd) {
          b = d; d = c; fd = fc;
          c = b - invphi * (b - a);
          fc = g(c);
        } else {
          a = c; c = d; fc = fd;
          d = a + invphi * (b - a);
          fd = g(d);
        }
      }
      // candidates: interval midpoint and both interval endpoints, so a
      // boundary optimum lands exactly on 0, 1 or the load cap
      const double cands[3] = {0.5 * (a + b), 0.0, hi};
      for (double t : cands) {
        const double v = g(t);
        if (v > best_c) {
          best_c = v;
          theta[j] = t;
        }
      }
      if (opts.record_trace) res.trace.emplace_back(theta, best_c);
    }
    if (best_c - round_start < opts.refine_tol) break;
  }

  const MacEvaluation fin = evaluate_mac(sys, profile, theta);
  res.theta_star = std::move(theta);
  res.c_star = fin.spectral_eff;
  res.eta_star = fin.eta;
  return res;
}

}  // namespace cdmara
