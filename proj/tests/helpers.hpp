#pragma once

#include <random>
#include <utility>
#include <vector>

#include "cdmara/model.hpp"

namespace cdmara::test {

// Two-class system: powers 10 and 1000 (SNR 10 dB and 30 dB at sigma^2 = 1),
// population ratio 10:1.
inline PowerProfile two_class(double theta1 = 1.0, double theta2 = 1.0) {
  return PowerProfile({{10.0, 10.0 / 11.0, theta1, std::nullopt},
                       {1000.0, 1.0 / 11.0, theta2, std::nullopt}});
}

inline PowerProfile single_class(double power, double theta = 1.0) {
  return PowerProfile({{power, 1.0, theta, std::nullopt}});
}

// Random feasible profile generator for property tests.
struct RandomSystem {
  double alpha;
  double sigma2;
  PowerProfile profile;
};

inline RandomSystem random_feasible_system(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> ncls(1, 4);
  const int m = ncls(rng);
  std::vector<PowerClass> classes;
  std::vector<double> fr(m);
  double fsum = 0.0;
  for (auto& f : fr) {
    f = 0.1 + unif(rng);
    fsum += f;
  }
  double power = 0.0;
  for (int i = 0; i < m; ++i) {
    power += 0.5 + 100.0 * unif(rng);
    classes.push_back({power, fr[i] / fsum, 0.05 + 0.95 * unif(rng), std::nullopt});
  }
  // renormalize the largest fraction so the sum is exactly 1 in doubles
  double s = 0.0;
  for (int i = 0; i + 1 < m; ++i) s += classes[i].fraction;
  classes.back().fraction = 1.0 - s;

  RandomSystem sys{0.1 + 2.0 * unif(rng), 0.2 + 2.0 * unif(rng), PowerProfile(classes)};
  // keep the decorrelator underloaded
  double mean_theta = 0.0;
  for (const auto& c : sys.profile.classes()) mean_theta += c.fraction * c.tx_prob;
  if (sys.alpha * mean_theta > 1.0) sys.alpha = 0.99 / mean_theta;
  return sys;
}

// Independent oracle for the MMSE fixed point: scans the residual on a
// uniform grid until the sign changes and returns the bracketing interval.
inline std::pair<double, double> mmse_scan_bracket(double alpha, double sigma2,
                                                   const PowerProfile& profile,
                                                   double step = 1e-6) {
  auto f = [&](double eta) {
    double acc = 0.0;
    for (const auto& c : profile.classes())
      acc += c.fraction * c.tx_prob * c.power / (1.0 + c.power * eta);
    return 1.0 / eta - sigma2 - alpha * acc;
  };
  double prev = step;
  double fprev = f(prev);
  for (double eta = 2 * step; eta <= 1.0 / sigma2 + step; eta += step) {
    const double fe = f(eta);
    if (fprev >= 0.0 && fe <= 0.0) return {prev, eta};
    prev = eta;
    fprev = fe;
  }
  return {prev, 1.0 / sigma2};
}

}  // namespace cdmara::test
