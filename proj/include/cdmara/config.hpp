#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdmara/finite_sim.hpp"
#include "cdmara/model.hpp"
#include "cdmara/queue.hpp"

namespace cdmara {

struct QueueRunSpec {
  QueueParams params;
  long slots = 1000000;

  bool operator==(const QueueRunSpec&) const = default;
};

// Fully resolved run configuration. Powers are always stored linear; the
// loader converts snr_db entries via p = sigma^2 10^(dB/10).
struct RunConfig {
  SystemConfig system;
  PowerProfile profile;
  std::optional<TrialConfig> sim;
  std::vector<QueueRunSpec> queue;
  std::string output_dir = ".";
  double tol = 1e-12;
  double grid_step = 0.05;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(path + (path.empty() ? "" : ".") + key + ": missing");
  return j.at(key);
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

inline double req_number(const json& j, const std::string& key, const std::string& path) {
  return as_number(require(j, key, path), path + (path.empty() ? "" : ".") + key);
}

inline std::string req_string(const json& j, const std::string& key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_string()) throw ConfigError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::req_number;
  using detail::req_string;

  const auto& jsys = detail::require(j, "system", "");
  SystemConfig sys;
  sys.alpha = req_number(jsys, "alpha", "system");
  sys.noise_var = req_number(jsys, "noise_variance", "system");
  if (!(sys.alpha > 0.0)) throw ConfigError("system.alpha: must be > 0");
  if (!(sys.noise_var > 0.0)) throw ConfigError("system.noise_variance: must be > 0");
  sys.receiver = parse_receiver(req_string(jsys, "receiver", "system"));
  if (jsys.contains("chip_model"))
    sys.chip_model = parse_chip_model(req_string(jsys, "chip_model", "system"));

  const auto& jcls = detail::require(j, "classes", "");
  if (!jcls.is_array() || jcls.empty()) throw ConfigError("classes: expected a non-empty array");
  std::vector<PowerClass> classes;
  for (std::size_t i = 0; i < jcls.size(); ++i) {
    const std::string at = "classes[" + std::to_string(i) + "]";
    const auto& jc = jcls[i];
    PowerClass c;
    const bool has_power = jc.contains("power");
    const bool has_snr = jc.contains("snr_db");
    if (has_power == has_snr)
      throw ConfigError(at + ": exactly one of power and snr_db is required");
    c.power = has_power ? detail::as_number(jc.at("power"), at + ".power")
                        : snr_db_to_power(detail::as_number(jc.at("snr_db"), at + ".snr_db"),
                                          sys.noise_var);
    c.fraction = req_number(jc, "fraction", at);
    c.tx_prob = req_number(jc, "tx_prob", at);
    if (jc.contains("arrival_rate"))
      c.arrival_rate = detail::as_number(jc.at("arrival_rate"), at + ".arrival_rate");
    classes.push_back(c);
  }
  auto v = validate_profile(classes);
  if (!v.ok()) {
    std::string msg;
    for (const auto& s : v.issues) msg += (msg.empty() ? "" : "; ") + s;
    throw ConfigError(msg);
  }

  std::optional<TrialConfig> sim;
  if (j.contains("sim")) {
    const auto& js = j.at("sim");
    TrialConfig tc;
    tc.spreading_gain = static_cast<int>(req_number(js, "spreading_gain", "sim"));
    tc.alpha = sys.alpha;
    tc.slots = static_cast<int>(req_number(js, "slots", "sim"));
    tc.trials = static_cast<int>(req_number(js, "trials", "sim"));
    if (js.contains("seed")) {
      const auto& jseed = js.at("seed");
      if (jseed.is_number_unsigned())
        tc.seed = jseed.get<std::uint64_t>();
      else
        tc.seed = static_cast<std::uint64_t>(detail::as_number(jseed, "sim.seed"));
    }
    tc.chip_model = sys.chip_model;
    if (tc.spreading_gain < 2) throw ConfigError("sim.spreading_gain: must be >= 2");
    if (tc.slots < 1) throw ConfigError("sim.slots: must be >= 1");
    if (tc.trials < 1) throw ConfigError("sim.trials: must be >= 1");
    sim = tc;
  }

  std::vector<QueueRunSpec> queue;
  if (j.contains("queue")) {
    const auto& jq = j.at("queue");
    if (!jq.is_array()) throw ConfigError("queue: expected an array");
    for (std::size_t i = 0; i < jq.size(); ++i) {
      const std::string at = "queue[" + std::to_string(i) + "]";
      QueueRunSpec qs;
      qs.params.arrival_rate = req_number(jq[i], "arrival_rate", at);
      qs.params.service_prob = req_number(jq[i], "service_prob", at);
      if (jq[i].contains("slots"))
        qs.slots = static_cast<long>(detail::as_number(jq[i].at("slots"), at + ".slots"));
      queue.push_back(qs);
    }
  }

  RunConfig rc{sys, PowerProfile(std::move(classes)), sim, std::move(queue)};
  if (j.contains("output") && j.at("output").contains("dir"))
    rc.output_dir = req_string(j.at("output"), "dir", "output");
  if (j.contains("options")) {
    const auto& jo = j.at("options");
    if (jo.contains("tol")) rc.tol = detail::as_number(jo.at("tol"), "options.tol");
    if (jo.contains("grid_step"))
      rc.grid_step = detail::as_number(jo.at("grid_step"), "options.grid_step");
  }
  return rc;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  return parse_config(j);
}

// Canonical JSON form with linear powers; load_config of this text
// reproduces the RunConfig exactly.
inline std::string canonical_config(const RunConfig& rc) {
  nlohmann::ordered_json j;
  j["system"] = {{"alpha", rc.system.alpha},
                 {"noise_variance", rc.system.noise_var},
                 {"receiver", to_string(rc.system.receiver)},
                 {"chip_model", to_string(rc.system.chip_model)}};
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& c : rc.profile.classes()) {
    nlohmann::ordered_json jc{{"power", c.power}, {"fraction", c.fraction},
                              {"tx_prob", c.tx_prob}};
    if (c.arrival_rate) jc["arrival_rate"] = *c.arrival_rate;
    j["classes"].push_back(jc);
  }
  if (rc.sim)
    j["sim"] = {{"spreading_gain", rc.sim->spreading_gain},
                {"slots", rc.sim->slots},
                {"trials", rc.sim->trials},
                {"seed", rc.sim->seed}};
  if (!rc.queue.empty()) {
    j["queue"] = nlohmann::ordered_json::array();
    for (const auto& q : rc.queue)
      j["queue"].push_back({{"arrival_rate", q.params.arrival_rate},
                            {"service_prob", q.params.service_prob},
                            {"slots", q.slots}});
  }
  j["output"] = {{"dir", rc.output_dir}};
  j["options"] = {{"tol", rc.tol}, {"grid_step", rc.grid_step}};
  return j.dump(2) + "\n";
}

}  // namespace cdmara
