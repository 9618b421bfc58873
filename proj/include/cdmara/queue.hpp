#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cdmara/asymptotic.hpp"

namespace cdmara {

struct QueueParams {
  double arrival_rate = 0.0;  // lambda, packets/slot
  double service_prob = 1.0;  // theta, per-slot transmission probability

  bool operator==(const QueueParams&) const = default;
};

enum class Stability { Stable, Boundary, Unstable };

inline std::string to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Boundary: return "boundary";
    case Stability::Unstable: return "unstable";
  }
  return "?";
}

// Stationary queue-length distribution of the single-user slotted queue:
// geometric tail q_m = q_1 beta^{m-1} with q_0 = 1 - lambda/theta. Fields
// are NaN unless the queue is stable.
struct QueueAnalytics {
  Stability stability = Stability::Unstable;
  double q0 = std::numeric_limits<double>::quiet_NaN();
  double q1 = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double mean_length = std::numeric_limits<double>::quiet_NaN();

  bool defined() const { return stability == Stability::Stable; }

  double pmf(long m) const {
    if (!defined() || m < 0) return std::numeric_limits<double>::quiet_NaN();
    if (m == 0) return q0;
    return q1 * std::pow(beta, static_cast<double>(m - 1));
  }
};

inline QueueAnalytics queue_analytics(const QueueParams& qp) {
  if (!(qp.arrival_rate >= 0.0 && qp.arrival_rate < 1.0))
    throw ConfigError("arrival rate must lie in [0,1)");
  if (!(qp.service_prob > 0.0 && qp.service_prob <= 1.0))
    throw ConfigError("service probability must lie in (0,1]");
  const double lam = qp.arrival_rate, th = qp.service_prob;
  QueueAnalytics out;
  if (lam > th) {
    out.stability = Stability::Unstable;
    return out;
  }
  if (lam == th) {  // null recurrent
    out.stability = Stability::Boundary;
    return out;
  }
  out.stability = Stability::Stable;
  out.q0 = 1.0 - lam / th;
  out.q1 = out.q0 * lam / ((1.0 - lam) * th);
  out.beta = lam * (1.0 - th) / ((1.0 - lam) * th);
  out.mean_length = lam * (1.0 - lam) / (th - lam);
  return out;
}

struct QueueTraceRow {
  long slot = 0;
  long length = 0;  // at slot start
  bool arrival = false;
  bool departure = false;
};

struct QueueSimResult {
  double empty_fraction = 0.0;   // fraction of slots with empty queue at slot start
  double mean_length = 0.0;      // time average of the slot-start length
  double departure_rate = 0.0;   // departures per slot
  double mean_sojourn = 0.0;     // per packet, service_slot - arrival_slot
  long departures = 0;
  long arrivals = 0;
  std::vector<double> state_freq;  // visit frequency of lengths 0..cap
};

// Slot dynamics: serve the head-of-line packet with probability theta, then
// admit an arrival with probability lambda; an arrival becomes eligible for
// service in the next slot. This gives transition rates m -> m-1 at
// theta(1-lambda) and m -> m+1 at lambda(1-theta).
inline QueueSimResult simulate_queue(const QueueParams& qp, long slots, std::uint64_t seed,
                                     std::vector<QueueTraceRow>* trace = nullptr,
                                     long max_trace = 10000) {
  if (slots < 1) throw ConfigError("slots must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  constexpr std::size_t kStateCap = 64;
  QueueSimResult res;
  res.state_freq.assign(kStateCap + 1, 0.0);
  std::deque<long> arrival_slots;
  long empty = 0;
  double len_sum = 0.0;
  double sojourn_sum = 0.0;

  for (long s = 0; s < slots; ++s) {
    const long m = static_cast<long>(arrival_slots.size());
    if (m == 0) ++empty;
    len_sum += static_cast<double>(m);
    res.state_freq[std::min<std::size_t>(m, kStateCap)] += 1.0;

    bool departed = false;
    if (m > 0 && unif(rng) < qp.service_prob) {
      sojourn_sum += static_cast<double>(s - arrival_slots.front());
      arrival_slots.pop_front();
      ++res.departures;
      departed = true;
    }
    bool arrived = false;
    if (unif(rng) < qp.arrival_rate) {
      arrival_slots.push_back(s);
      ++res.arrivals;
      arrived = true;
    }
    if (trace && s < max_trace) trace->push_back({s, m, arrived, departed});
  }
  res.empty_fraction = static_cast<double>(empty) / slots;
  res.mean_length = len_sum / slots;
  res.departure_rate = static_cast<double>(res.departures) / slots;
  res.mean_sojourn = res.departures > 0 ? sojourn_sum / res.departures : 0.0;
  for (auto& f : res.state_freq) f /= static_cast<double>(slots);
  return res;
}

struct ClassQueueReport {
  std::size_t index = 0;
  double arrival_rate = 0.0;
  double tx_prob = 0.0;
  double q0 = 0.0;
  double mean_length = 0.0;
  double info_rate = 0.0;      // lambda * R(p), bits/symbol
  double link_capacity = 0.0;  // theta * R(p), bits/symbol
};

struct StableCapacityReport {
  CapacityReport capacity;
  std::vector<ClassQueueReport> per_class;
};

// Stable-system capacity: every queue must be strictly inside the stability
// region, then the dominating-system formulas apply with theta replaced by
// lambda.
inline StableCapacityReport stable_system_capacity(const SystemConfig& sys,
                                                   const PowerProfile& profile,
                                                   double tol = 1e-12) {
  std::vector<double> lambdas;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& c = profile[i];
    const std::string at = "classes[" + std::to_string(i) + "]";
    if (!c.arrival_rate)
      throw DomainError(at + ": arrival_rate required for the stable-system analysis");
    if (*c.arrival_rate > c.tx_prob)
      throw DomainError(at + ": unstable, arrival rate " + std::to_string(*c.arrival_rate) +
                        " exceeds service probability " + std::to_string(c.tx_prob));
    if (*c.arrival_rate == c.tx_prob)
      throw DomainError(at + ": boundary of the stability region (arrival rate equals "
                             "service probability)");
    lambdas.push_back(*c.arrival_rate);
  }

  StableCapacityReport rep;
  rep.capacity = capacity_report(sys, profile.with_tx_probs(lambdas), tol);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const auto& c = profile[i];
    const QueueAnalytics qa = queue_analytics({*c.arrival_rate, c.tx_prob});
    ClassQueueReport cr;
    cr.index = i;
    cr.arrival_rate = *c.arrival_rate;
    cr.tx_prob = c.tx_prob;
    cr.q0 = qa.q0;
    cr.mean_length = qa.mean_length;
    const double rate = coded_rate(c.power, rep.capacity.sir.eta);
    cr.info_rate = *c.arrival_rate * rate;
    cr.link_capacity = c.tx_prob * rate;
    rep.per_class.push_back(cr);
  }
  return rep;
}

}  // namespace cdmara
