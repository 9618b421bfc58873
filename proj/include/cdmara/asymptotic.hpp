#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cdmara/model.hpp"

namespace cdmara {

enum class SirRegime { Underloaded, Overloaded, ClosedForm, FixedPoint };

inline std::string to_string(SirRegime r) {
  switch (r) {
    case SirRegime::Underloaded: return "underloaded";
    case SirRegime::Overloaded: return "overloaded";
    case SirRegime::ClosedForm: return "closed-form";
    case SirRegime::FixedPoint: return "fixed-point";
  }
  return "?";
}

// Limit unit-power SIR with solver diagnostics. A user with power p sees
// SIR p * eta.
struct SirSolution {
  double eta = 0.0;
  Receiver receiver = Receiver::Mmse;
  int iterations = 0;
  double residual = 0.0;
  SirRegime regime = SirRegime::ClosedForm;
  // The overloaded decorrelator value is derived for Gaussian chips only.
  bool gaussian_chip_assumption = false;
};

// Residual of the MMSE fixed point: 1/eta - sigma^2 - alpha E[theta p / (1 + p eta)].
inline double mmse_fixed_point_residual(double eta, double alpha, double sigma2,
                                        const PowerProfile& profile) {
  double interference = 0.0;
  for (const auto& c : profile.classes())
    interference += c.fraction * c.tx_prob * c.power / (1.0 + c.power * eta);
  return 1.0 / eta - sigma2 - alpha * interference;
}

// The residual is strictly decreasing on (0, 1/sigma^2]: it diverges to
// +inf as eta -> 0+ and is <= 0 at 1/sigma^2, so bisection brackets the
// unique root.
inline SirSolution solve_sir_mmse(double alpha, double sigma2, const PowerProfile& profile,
                                  double tol = 1e-12) {
  if (!(sigma2 > 0.0)) throw ConfigError("noise variance must be positive");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  constexpr int kMaxIter = 200;
  SirSolution out;
  out.receiver = Receiver::Mmse;
  out.regime = SirRegime::FixedPoint;

  double hi = 1.0 / sigma2;
  double f_hi = mmse_fixed_point_residual(hi, alpha, sigma2, profile);
  if (std::abs(f_hi) <= tol) {  // no interference: single-user bound
    out.eta = hi;
    out.residual = f_hi;
    return out;
  }
  double lo = 1e-15;
  for (int it = 1; it <= kMaxIter; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = mmse_fixed_point_residual(mid, alpha, sigma2, profile);
    out.iterations = it;
    if (std::abs(f_mid) <= tol) {
      out.eta = mid;
      out.residual = f_mid;
      return out;
    }
    if (f_mid > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  throw NumericalError("MMSE SIR bisection did not reach tol=" + std::to_string(tol) +
                       " in 200 iterations; bracket [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
}

inline SirSolution sir_decorrelator(double alpha, double sigma2, const PowerProfile& profile) {
  if (!(sigma2 > 0.0)) throw ConfigError("noise variance must be positive");
  SirSolution out;
  out.receiver = Receiver::Decorrelator;
  const double load = traffic_load(alpha, profile);
  if (load <= 1.0) {
    out.eta = (1.0 - load) / sigma2;
    out.regime = SirRegime::Underloaded;
    return out;
  }
  if (profile.size() != 1)
    throw DomainError(
        "overloaded decorrelator SIR is known only for the equal-power system "
        "(active load " + std::to_string(load) + " > 1 with multiple classes)");
  const double at = alpha * profile[0].tx_prob;
  out.eta = (at - 1.0) / (at * sigma2 + (at - 1.0) * (at - 1.0) * profile[0].power);
  out.regime = SirRegime::Overloaded;
  out.gaussian_chip_assumption = true;
  return out;
}

inline SirSolution sir_mf(double alpha, double sigma2, const PowerProfile& profile) {
  if (!(sigma2 > 0.0)) throw ConfigError("noise variance must be positive");
  SirSolution out;
  out.receiver = Receiver::Mf;
  out.regime = SirRegime::ClosedForm;
  out.eta = 1.0 / (sigma2 + alpha * profile_moments(profile).mean_tx_power);
  return out;
}

inline SirSolution solve_sir(const SystemConfig& sys, const PowerProfile& profile,
                             double tol = 1e-12) {
  switch (sys.receiver) {
    case Receiver::Mmse: return solve_sir_mmse(sys.alpha, sys.noise_var, profile, tol);
    case Receiver::Decorrelator: return sir_decorrelator(sys.alpha, sys.noise_var, profile);
    case Receiver::Mf: return sir_mf(sys.alpha, sys.noise_var, profile);
  }
  throw ConfigError("unknown receiver");
}

// Single-user coded rate (1/2) log2(1 + p eta) bits/symbol.
inline double coded_rate(double p, double eta) {
  return 0.5 * std::log2(1.0 + p * eta);
}

// Effective link capacity including the access probability.
inline double link_capacity(double p, double theta, double eta) {
  return theta * coded_rate(p, eta);
}

// Minimum bit energy per noise level, linear. Independent of theta.
inline double eb_n0_linear(double p, double sigma2, double eta) {
  const double bits = std::log2(1.0 + p * eta);
  if (!(bits > 0.0))
    throw NumericalError("log2(1 + p*eta) underflowed for p=" + std::to_string(p));
  return p / (sigma2 * bits);
}

// System spectral efficiency (alpha/2) E[theta log2(1 + p eta)] bits/s/Hz.
inline double spectral_efficiency(double alpha, const PowerProfile& profile, double eta) {
  double c = 0.0;
  for (const auto& cl : profile.classes())
    c += cl.fraction * cl.tx_prob * std::log2(1.0 + cl.power * eta);
  return 0.5 * alpha * c;
}

struct ClassMetrics {
  std::size_t index = 0;
  double link_capacity = 0.0;  // bits/symbol including theta
  double coded_rate = 0.0;     // bits/symbol
  double eb_n0 = 0.0;          // linear; +inf when p*eta underflows
  double eb_n0_db = 0.0;
};

struct CapacityReport {
  SirSolution sir;
  double load = 0.0;
  double spectral_efficiency = 0.0;
  std::vector<ClassMetrics> per_class;
};

inline CapacityReport capacity_report(const SystemConfig& sys, const PowerProfile& profile,
                                      double tol = 1e-12) {
  CapacityReport rep;
  rep.sir = solve_sir(sys, profile, tol);
  rep.load = traffic_load(sys.alpha, profile);
  rep.spectral_efficiency = spectral_efficiency(sys.alpha, profile, rep.sir.eta);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& c = profile[i];
    ClassMetrics m;
    m.index = i;
    m.coded_rate = coded_rate(c.power, rep.sir.eta);
    m.link_capacity = c.tx_prob * m.coded_rate;
    const double bits = std::log2(1.0 + c.power * rep.sir.eta);
    if (bits > 0.0) {
      m.eb_n0 = c.power / (sys.noise_var * bits);
      m.eb_n0_db = 10.0 * std::log10(m.eb_n0);
    } else {
      m.eb_n0 = std::numeric_limits<double>::infinity();
      m.eb_n0_db = std::numeric_limits<double>::infinity();
    }
    rep.per_class.push_back(m);
  }
  return rep;
}

}  // namespace cdmara
