#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "cdmara/asymptotic.hpp"

namespace cdmara {

struct TrialConfig {
  int spreading_gain = 64;  // N
  double alpha = 1.0;       // K = round(alpha * N), at least 2
  int slots = 1;
  int trials = 1;
  std::uint64_t seed = 0;
  ChipModel chip_model = ChipModel::Binary;

  bool operator==(const TrialConfig&) const = default;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Substream for trial t: counter scheme seed = splitmix64(master + t + 1),
// so trials are reproducible independently of execution order.
inline std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(master_seed + trial + 1));
}

// N x K spreading matrix, one unit-scale column per user. Binary chips are
// +-1/sqrt(N) (exact unit column norm); Gaussian chips are N(0, 1/N).
inline Eigen::MatrixXd gen_spreading(int n, int k, ChipModel model, std::mt19937_64& rng) {
  Eigen::MatrixXd s(n, k);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  if (model == ChipModel::Binary) {
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i)
        s(i, j) = (rng() >> 63) ? scale : -scale;
  } else {
    std::normal_distribution<double> chip(0.0, scale);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i)
        s(i, j) = chip(rng);
  }
  return s;
}

struct ClassAssignment {
  std::vector<double> powers;
  std::vector<double> thetas;
  std::vector<int> labels;
};

// Deterministic largest-remainder apportionment of K users to the profile's
// classes. User 0 is the probe and is placed in probe_class.
inline ClassAssignment assign_classes(int k, const PowerProfile& profile, int probe_class) {
  const int m = static_cast<int>(profile.size());
  if (k < m) throw ConfigError("K=" + std::to_string(k) + " smaller than class count");
  if (probe_class < 0 || probe_class >= m) throw ConfigError("probe class out of range");

  std::vector<int> counts(m);
  std::vector<double> remainder(m);
  int assigned = 0;
  for (int i = 0; i < m; ++i) {
    const double exact = k * profile[i].fraction;
    counts[i] = static_cast<int>(std::floor(exact + 1e-9));
    remainder[i] = exact - counts[i];
    assigned += counts[i];
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (int i = 0; assigned < k; ++i, ++assigned) ++counts[order[i % m]];
  if (counts[probe_class] == 0) {  // steal one user from the largest class
    const int big = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    --counts[big];
    ++counts[probe_class];
  }

  ClassAssignment out;
  out.powers.reserve(k);
  out.thetas.reserve(k);
  out.labels.reserve(k);
  auto push = [&](int cls) {
    out.powers.push_back(profile[cls].power);
    out.thetas.push_back(profile[cls].tx_prob);
    out.labels.push_back(cls);
  };
  push(probe_class);
  --counts[probe_class];
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < counts[i]; ++c) push(i);
  return out;
}

struct SlotSample {
  int active_count = 0;  // K_a, probe included
  double load = 0.0;     // K_a / N
  double sir_mmse = 0.0;
  double sir_dec = 0.0;
  double sir_mf = 0.0;
  std::vector<double> loaded_powers;  // p_i u_i over interferers
  bool numerical_warning = false;
};

// Decorrelator SIR when the active interferer matrix has full column rank:
// the receiver projects onto the orthogonal complement and the interference
// is nulled exactly.
inline double decorrelator_sir_projector(const Eigen::VectorXd& s1, const Eigen::MatrixXd& active,
                                         double p1, double sigma2) {
  double energy = s1.squaredNorm();
  if (active.cols() > 0) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(active, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) <= cutoff) break;
      const double c = svd.matrixU().col(i).dot(s1);
      energy -= c * c;
    }
  }
  return p1 * std::max(energy, 0.0) / sigma2;
}

// General decorrelator SIR via the pseudo-inverse of [s1, active]; valid in
// the overloaded / rank-deficient case where interference leaks through.
inline double decorrelator_sir_pinv(const Eigen::VectorXd& s1, const Eigen::MatrixXd& active,
                                    const Eigen::VectorXd& active_powers, double p1,
                                    double sigma2) {
  const int n = static_cast<int>(s1.size());
  Eigen::MatrixXd a(n, active.cols() + 1);
  a.col(0) = s1;
  if (active.cols() > 0) a.rightCols(active.cols()) = active;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * sv(0);
  // receiver vector: first column of (A^+)^T
  Eigen::VectorXd l1 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cutoff) break;
    l1 += (svd.matrixV()(0, i) / sv(i)) * svd.matrixU().col(i);
  }
  const double num = p1 * std::pow(l1.dot(s1), 2);
  double den = sigma2 * l1.squaredNorm();
  for (int j = 0; j < active.cols(); ++j)
    den += active_powers(j) * std::pow(l1.dot(active.col(j)), 2);
  return den > 0.0 ? num / den : 0.0;
}

// One symbol slot: draws the interferers' transmit indicators and computes
// the probe's empirical SIR for all three receivers analytically (symbols
// and noise integrate out of the signal/interference power ratio). The
// probe (column 0) is conditioned on transmitting; its theta is not used.
inline SlotSample run_slot(const Eigen::MatrixXd& s, const std::vector<double>& powers,
                           const std::vector<double>& thetas, double sigma2,
                           std::mt19937_64& rng) {
  const int n = static_cast<int>(s.rows());
  const int k = static_cast<int>(s.cols());
  const double p1 = powers[0];
  const Eigen::VectorXd s1 = s.col(0);

  SlotSample out;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> active;
  out.loaded_powers.reserve(k - 1);
  for (int i = 1; i < k; ++i) {
    const bool on = unif(rng) < thetas[i];
    out.loaded_powers.push_back(on ? powers[i] : 0.0);
    if (on) active.push_back(i);
  }
  const int m = static_cast<int>(active.size());
  out.active_count = m + 1;
  out.load = static_cast<double>(out.active_count) / n;

  Eigen::MatrixXd act(n, m);
  Eigen::VectorXd pa(m);
  for (int j = 0; j < m; ++j) {
    act.col(j) = s.col(active[j]);
    pa(j) = powers[active[j]];
  }

  const double n1sq = s1.squaredNorm();

  // MF: P_s / P_in with l1 = s1
  double interf = 0.0;
  if (m > 0) {
    const Eigen::VectorXd cross = act.transpose() * s1;
    for (int j = 0; j < m; ++j) interf += pa(j) * cross(j) * cross(j);
  }
  out.sir_mf = p1 * n1sq * n1sq / (sigma2 * n1sq + interf);

  // MMSE: p1 s1^T (sigma^2 I + A P A^T)^{-1} s1 via an SPD solve
  if (m > 0) {
    Eigen::MatrixXd cov = sigma2 * Eigen::MatrixXd::Identity(n, n);
    cov.noalias() += act * pa.asDiagonal() * act.transpose();
    out.sir_mmse = p1 * s1.dot(cov.llt().solve(s1));
  } else {
    out.sir_mmse = p1 * n1sq / sigma2;
  }

  // Decorrelator: projector form when the active matrix has full column
  // rank, pseudo-inverse form otherwise.
  if (m == 0) {
    out.sir_dec = p1 * n1sq / sigma2;
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(act);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-10 * sv(0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    if (rank < std::min(m, n)) out.numerical_warning = true;
    if (rank == m)
      out.sir_dec = decorrelator_sir_projector(s1, act, p1, sigma2);
    else
      out.sir_dec = decorrelator_sir_pinv(s1, act, pa, p1, sigma2);
  }
  return out;
}

// Sup over the step atoms {0, p_1, ..., p_M} of |H_K - H| between the
// empirical loaded-power CDF and its limit.
inline double ks_check(const std::vector<double>& samples, const PowerProfile& profile) {
  if (samples.empty()) throw ConfigError("ks_check needs at least one sample");
  std::vector<double> atoms{0.0};
  for (const auto& c : profile.classes()) atoms.push_back(c.power);
  double sup = 0.0;
  for (double x : atoms) {
    std::size_t count = 0;
    for (double v : samples)
      if (v <= x) ++count;
    const double hk = static_cast<double>(count) / samples.size();
    sup = std::max(sup, std::abs(hk - limit_loaded_power_cdf(profile, x)));
  }
  return sup;
}

struct ReceiverStats {
  double mean = 0.0;
  double stddev = 0.0;
};

struct SimSummary {
  ReceiverStats mmse, dec, mf;
  double mean_load = 0.0;
  double load_std = 0.0;
  double ks_distance = 0.0;
  // asymptotic eta at alpha = K/N; NaN where the limit formula is undefined
  double eta_mmse = 0.0;
  double eta_dec = 0.0;
  double eta_mf = 0.0;
  double probe_power = 0.0;
  int spreading_gain = 0;
  int users = 0;
  int warnings = 0;
};

struct SampleRow {
  int trial = 0;
  int slot = 0;
  SlotSample sample;
};

struct SimResult {
  SimSummary summary;
  std::vector<SampleRow> samples;
};

inline ReceiverStats stats_of(const std::vector<double>& v) {
  ReceiverStats s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= v.size();
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(acc / (v.size() - 1));
  }
  return s;
}

// Runs trials x slots independent slot draws. Deterministic given the seed:
// trial t owns the substream trial_rng(seed, t) and results are aggregated
// in trial order.
inline SimResult run_trials(const TrialConfig& tc, const SystemConfig& sys,
                            const PowerProfile& profile, int probe_class, double tol = 1e-12) {
  if (tc.spreading_gain < 2 || tc.slots < 1 || tc.trials < 1)
    throw ConfigError("trial config requires N >= 2, slots >= 1, trials >= 1");
  const int n = tc.spreading_gain;
  const int k = std::max<long>(2, std::lround(tc.alpha * n));
  const ClassAssignment users = assign_classes(k, profile, probe_class);

  SimResult res;
  std::vector<double> sm, sd, smf, loads, pooled;
  for (int t = 0; t < tc.trials; ++t) {
    std::mt19937_64 rng = trial_rng(tc.seed, t);
    for (int sl = 0; sl < tc.slots; ++sl) {
      const Eigen::MatrixXd s = gen_spreading(n, k, tc.chip_model, rng);
      SlotSample sample = run_slot(s, users.powers, users.thetas, sys.noise_var, rng);
      sm.push_back(sample.sir_mmse);
      sd.push_back(sample.sir_dec);
      smf.push_back(sample.sir_mf);
      loads.push_back(sample.load);
      pooled.insert(pooled.end(), sample.loaded_powers.begin(), sample.loaded_powers.end());
      if (sample.numerical_warning) ++res.summary.warnings;
      res.samples.push_back({t, sl, std::move(sample)});
    }
  }

  SimSummary& sum = res.summary;
  sum.mmse = stats_of(sm);
  sum.dec = stats_of(sd);
  sum.mf = stats_of(smf);
  const ReceiverStats ls = stats_of(loads);
  sum.mean_load = ls.mean;
  sum.load_std = ls.stddev;
  sum.ks_distance = ks_check(pooled, profile);
  sum.probe_power = users.powers[0];
  sum.spreading_gain = n;
  sum.users = k;

  const double alpha_eff = static_cast<double>(k) / n;
  sum.eta_mmse = solve_sir_mmse(alpha_eff, sys.noise_var, profile, tol).eta;
  try {
    sum.eta_dec = sir_decorrelator(alpha_eff, sys.noise_var, profile).eta;
  } catch (const DomainError&) {
    sum.eta_dec = std::numeric_limits<double>::quiet_NaN();
  }
  sum.eta_mf = sir_mf(alpha_eff, sys.noise_var, profile).eta;
  return res;
}

}  // namespace cdmara
