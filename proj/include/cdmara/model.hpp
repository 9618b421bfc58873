#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cdmara/errors.hpp"

namespace cdmara {

enum class Receiver { Mmse, Decorrelator, Mf };
enum class ChipModel { Binary, Gaussian };

inline std::string to_string(Receiver r) {
  switch (r) {
    case Receiver::Mmse: return "mmse";
    case Receiver::Decorrelator: return "decorrelator";
    case Receiver::Mf: return "mf";
  }
  return "?";
}

inline Receiver parse_receiver(const std::string& s) {
  if (s == "mmse") return Receiver::Mmse;
  if (s == "decorrelator") return Receiver::Decorrelator;
  if (s == "mf") return Receiver::Mf;
  throw ConfigError("unknown receiver '" + s + "' (expected mmse|decorrelator|mf)");
}

inline std::string to_string(ChipModel m) {
  return m == ChipModel::Binary ? "binary" : "gaussian";
}

inline ChipModel parse_chip_model(const std::string& s) {
  if (s == "binary") return ChipModel::Binary;
  if (s == "gaussian") return ChipModel::Gaussian;
  throw ConfigError("unknown chip_model '" + s + "' (expected binary|gaussian)");
}

// One power class of the discrete power distribution: linear received power,
// population share, per-slot transmission probability, and (for the stable
// system) the packet arrival rate.
struct PowerClass {
  double power = 0.0;
  double fraction = 0.0;
  double tx_prob = 1.0;
  std::optional<double> arrival_rate;

  bool operator==(const PowerClass&) const = default;
};

struct ValidationResult {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

// Diagnostic check of all profile invariants; collects every violation
// instead of stopping at the first.
inline ValidationResult validate_profile(const std::vector<PowerClass>& classes) {
  ValidationResult r;
  if (classes.empty()) {
    r.issues.push_back("profile has no classes");
    return r;
  }
  double fraction_sum = 0.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const auto& c = classes[i];
    const std::string at = "classes[" + std::to_string(i) + "]";
    if (!(c.power > 0.0) || !std::isfinite(c.power))
      r.issues.push_back(at + ": power must be positive and finite");
    if (!(c.fraction > 0.0) || !std::isfinite(c.fraction))
      r.issues.push_back(at + ": fraction must be positive");
    if (!(c.tx_prob >= 0.0 && c.tx_prob <= 1.0))
      r.issues.push_back(at + ": tx_prob must lie in [0,1]");
    if (c.arrival_rate && !(*c.arrival_rate >= 0.0 && *c.arrival_rate < 1.0))
      r.issues.push_back(at + ": arrival_rate must lie in [0,1)");
    if (i > 0 && !(classes[i - 1].power < c.power)) {
      if (classes[i - 1].power == c.power)
        r.issues.push_back(at + ": duplicate power " + std::to_string(c.power));
      else
        r.issues.push_back(at + ": powers must be strictly increasing");
    }
    fraction_sum += c.fraction;
  }
  if (std::abs(fraction_sum - 1.0) > 1e-12)
    r.issues.push_back("fractions sum to " + std::to_string(fraction_sum) + ", expected 1");
  return r;
}

// Discrete power distribution F as an ordered list of classes. Immutable
// after construction; the validating constructor rejects any invariant
// violation.
class PowerProfile {
 public:
  explicit PowerProfile(std::vector<PowerClass> classes) : classes_(std::move(classes)) {
    auto v = validate_profile(classes_);
    if (!v.ok()) {
      std::string msg = "invalid power profile:";
      for (const auto& s : v.issues) msg += " " + s + ";";
      throw ConfigError(msg);
    }
  }

  // Bypasses validation. Test-only escape hatch (e.g. splitting a class into
  // two entries of equal power to probe invariance).
  static PowerProfile unchecked(std::vector<PowerClass> classes) {
    PowerProfile p;
    p.classes_ = std::move(classes);
    return p;
  }

  const std::vector<PowerClass>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  const PowerClass& operator[](std::size_t i) const { return classes_[i]; }

  // Same powers and fractions, new transmission probabilities.
  PowerProfile with_tx_probs(const std::vector<double>& thetas) const {
    if (thetas.size() != classes_.size())
      throw ConfigError("theta vector length " + std::to_string(thetas.size()) +
                        " does not match class count " + std::to_string(classes_.size()));
    PowerProfile p;
    p.classes_ = classes_;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      if (!(thetas[i] >= 0.0 && thetas[i] <= 1.0))
        throw ConfigError("tx_prob out of [0,1] at class " + std::to_string(i));
      p.classes_[i].tx_prob = thetas[i];
    }
    return p;
  }

  double max_power() const {
    double m = 0.0;
    for (const auto& c : classes_) m = std::max(m, c.power);
    return m;
  }

  bool operator==(const PowerProfile&) const = default;

 private:
  PowerProfile() = default;
  std::vector<PowerClass> classes_;
};

// E[theta(p)] and E[theta(p) p] under F.
struct ProfileMoments {
  double mean_tx_prob = 0.0;
  double mean_tx_power = 0.0;
};

inline ProfileMoments profile_moments(const PowerProfile& profile) {
  ProfileMoments m;
  for (const auto& c : profile.classes()) {
    m.mean_tx_prob += c.fraction * c.tx_prob;
    m.mean_tx_power += c.fraction * c.tx_prob * c.power;
  }
  return m;
}

// Limit traffic load: active users per chip, alpha * E[theta(p)].
inline double traffic_load(double alpha, const PowerProfile& profile) {
  return alpha * profile_moments(profile).mean_tx_prob;
}

// Limit CDF of the loaded powers {p_i u_i}: an atom of mass 1 - E[theta]
// at zero plus the theta-weighted power distribution.
inline double limit_loaded_power_cdf(const PowerProfile& profile, double x) {
  if (x < 0.0) throw DomainError("loaded-power CDF argument must be >= 0");
  double h = 1.0 - profile_moments(profile).mean_tx_prob;
  for (const auto& c : profile.classes())
    if (c.power <= x) h += c.fraction * c.tx_prob;
  return h;
}

struct SystemConfig {
  double alpha = 1.0;      // demanding users per chip, K/N
  double noise_var = 1.0;  // sigma^2
  Receiver receiver = Receiver::Mmse;
  ChipModel chip_model = ChipModel::Binary;

  bool operator==(const SystemConfig&) const = default;
};

// Powers may be configured as SNR in dB relative to the noise variance.
inline double snr_db_to_power(double snr_db, double noise_var) {
  return noise_var * std::pow(10.0, snr_db / 10.0);
}

}  // namespace cdmara
