// Command-line front-end: loads a JSON run configuration, dispatches one
// subcommand, prints a report to stdout, and writes deterministic CSV
// artifacts for plotting and golden-file tests.
//
// Exit codes: 0 success, 1 config error, 2 numerical non-convergence,
// 3 model-domain error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cdmara/config.hpp"
#include "cdmara/csv.hpp"
#include "cdmara/finite_sim.hpp"
#include "cdmara/mac_opt.hpp"
#include "cdmara/queue.hpp"

namespace {

using namespace cdmara;
namespace fs = std::filesystem;

struct Flags {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> receiver;
  std::optional<double> grid_step;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> spreading_gain;
  std::optional<int> slots;
  std::optional<int> trials;
};

// Flag > config > default.
RunConfig resolve(const Flags& f) {
  RunConfig rc = load_config(f.config_path);
  if (f.out_dir) rc.output_dir = *f.out_dir;
  if (f.receiver) rc.system.receiver = parse_receiver(*f.receiver);
  if (f.grid_step) rc.grid_step = *f.grid_step;
  if (f.tol) rc.tol = *f.tol;
  if (rc.sim) {
    rc.sim->chip_model = rc.system.chip_model;
    if (f.seed) rc.sim->seed = *f.seed;
    if (f.spreading_gain) rc.sim->spreading_gain = *f.spreading_gain;
    if (f.slots) rc.sim->slots = *f.slots;
    if (f.trials) rc.sim->trials = *f.trials;
  }
  return rc;
}

std::string out_path(const RunConfig& rc, const std::string& name) {
  fs::create_directories(rc.output_dir);
  return (fs::path(rc.output_dir) / name).string();
}

void cmd_sir(const RunConfig& rc) {
  const SirSolution s = solve_sir(rc.system, rc.profile, rc.tol);
  std::printf("receiver    %s\n", to_string(s.receiver).c_str());
  std::printf("eta         %.12g\n", s.eta);
  std::printf("load        %.12g\n", traffic_load(rc.system.alpha, rc.profile));
  std::printf("regime      %s\n", to_string(s.regime).c_str());
  std::printf("iterations  %d\n", s.iterations);
  std::printf("residual    %.3e\n", s.residual);
  if (s.gaussian_chip_assumption)
    std::printf("note        overloaded value assumes Gaussian chips\n");
}

void cmd_capacity(const RunConfig& rc) {
  const CapacityReport rep = capacity_report(rc.system, rc.profile, rc.tol);
  std::printf("receiver             %s\n", to_string(rc.system.receiver).c_str());
  std::printf("eta                  %.12g\n", rep.sir.eta);
  std::printf("load                 %.12g\n", rep.load);
  std::printf("spectral_efficiency  %.12g bits/s/Hz\n", rep.spectral_efficiency);
  std::printf("%-6s %-12s %-8s %-12s %-12s %-12s %-10s\n", "class", "power", "tx_prob",
              "T(p)", "R(p)", "eb_n0", "eb_n0_db");
  std::vector<CsvRow> rows;
  for (const auto& m : rep.per_class) {
    const auto& c = rc.profile[m.index];
    std::printf("%-6zu %-12.6g %-8.4g %-12.6g %-12.6g %-12.6g %-10.4f\n", m.index, c.power,
                c.tx_prob, m.link_capacity, m.coded_rate, m.eb_n0, m.eb_n0_db);
    rows.push_back({std::to_string(m.index), format_sig(c.power), format_sig(c.tx_prob),
                    format_sig(m.link_capacity), format_sig(m.coded_rate),
                    format_sig(m.eb_n0), format_sig(m.eb_n0_db)});
  }
  emit_csv({"class", "power", "tx_prob", "link_capacity", "coded_rate", "eb_n0", "eb_n0_db"},
           rows, out_path(rc, "capacity.csv"));
}

void cmd_sweep(const RunConfig& rc) {
  const auto rows = sweep_grid(rc.system, rc.profile, rc.grid_step, rc.tol);
  std::vector<std::string> header;
  for (std::size_t i = 0; i < rc.profile.size(); ++i)
    header.push_back("theta_" + std::to_string(i + 1));
  header.insert(header.end(), {"eta", "load", "C"});
  std::vector<CsvRow> out;
  for (const auto& r : rows) {
    CsvRow row;
    for (double t : r.thetas) row.push_back(format_sig(t));
    row.push_back(format_sig(r.eta));  // nan marks infeasible points
    row.push_back(format_sig(r.load));
    row.push_back(format_sig(r.spectral_eff));
    out.push_back(std::move(row));
  }
  const std::string path = out_path(rc, "sweep.csv");
  emit_csv(header, out, path);
  const SweepRow* best = grid_argmax(rows);
  if (best) {
    std::printf("grid points  %zu\n", rows.size());
    std::printf("argmax theta ");
    for (double t : best->thetas) std::printf("%.4g ", t);
    std::printf("\nC_max        %.12g\n", best->spectral_eff);
  }
  std::printf("csv          %s\n", path.c_str());
}

void cmd_optimize(const RunConfig& rc) {
  OptimizeOptions opts;
  opts.record_trace = true;
  const OptResult res = optimize_mac(rc.system, rc.profile, opts);
  std::printf("theta_star   ");
  for (double t : res.theta_star) std::printf("%.8g ", t);
  std::printf("\nC_star       %.12g\n", res.c_star);
  std::printf("eta_star     %.12g\n", res.eta_star);
  std::printf("evaluations  %ld\n", res.evaluations);
  std::vector<std::string> header;
  for (std::size_t i = 0; i < rc.profile.size(); ++i)
    header.push_back("theta_" + std::to_string(i + 1));
  header.push_back("C");
  std::vector<CsvRow> rows;
  for (const auto& [th, c] : res.trace) {
    CsvRow row;
    for (double t : th) row.push_back(format_sig(t));
    row.push_back(format_sig(c));
    rows.push_back(std::move(row));
  }
  emit_csv(header, rows, out_path(rc, "optimize_trace.csv"));
}

void cmd_simulate(const RunConfig& rc) {
  if (!rc.sim) throw ConfigError("sim: section required for the simulate subcommand");
  const SimResult res = run_trials(*rc.sim, rc.system, rc.profile, 0, rc.tol);
  const SimSummary& s = res.summary;
  std::printf("N=%d K=%d slots=%d trials=%d seed=%llu chips=%s\n", s.spreading_gain, s.users,
              rc.sim->slots, rc.sim->trials,
              static_cast<unsigned long long>(rc.sim->seed),
              to_string(rc.sim->chip_model).c_str());
  std::printf("%-12s %-14s %-14s %-14s\n", "receiver", "mean SIR", "std SIR", "p1*eta limit");
  std::printf("%-12s %-14.6g %-14.6g %-14.6g\n", "mmse", s.mmse.mean, s.mmse.stddev,
              s.probe_power * s.eta_mmse);
  std::printf("%-12s %-14.6g %-14.6g %-14.6g\n", "decorrelator", s.dec.mean, s.dec.stddev,
              s.probe_power * s.eta_dec);
  std::printf("%-12s %-14.6g %-14.6g %-14.6g\n", "mf", s.mf.mean, s.mf.stddev,
              s.probe_power * s.eta_mf);
  std::printf("load         %.6g (std %.6g, limit %.6g)\n", s.mean_load, s.load_std,
              traffic_load(static_cast<double>(s.users) / s.spreading_gain, rc.profile));
  std::printf("ks_distance  %.6g\n", s.ks_distance);
  if (s.warnings) std::printf("warnings     %d rank-deficient slots\n", s.warnings);

  std::vector<CsvRow> rows;
  for (const auto& r : res.samples)
    rows.push_back({std::to_string(r.trial), std::to_string(r.slot),
                    std::to_string(r.sample.active_count), format_sig(r.sample.load),
                    format_sig(r.sample.sir_mmse), format_sig(r.sample.sir_dec),
                    format_sig(r.sample.sir_mf)});
  const std::string path = out_path(rc, "simulate_samples.csv");
  emit_csv({"trial", "slot", "K_a", "load", "sir_mmse", "sir_dec", "sir_mf"}, rows, path);
  std::printf("csv          %s\n", path.c_str());
}

void cmd_queue(const RunConfig& rc, std::uint64_t seed) {
  if (rc.queue.empty()) throw ConfigError("queue: section required for the queue subcommand");
  for (std::size_t i = 0; i < rc.queue.size(); ++i) {
    const auto& spec = rc.queue[i];
    const QueueAnalytics qa = queue_analytics(spec.params);
    std::printf("queue[%zu]  lambda=%.4g theta=%.4g slots=%ld  %s\n", i,
                spec.params.arrival_rate, spec.params.service_prob, spec.slots,
                to_string(qa.stability).c_str());
    std::vector<QueueTraceRow> trace;
    const QueueSimResult sim = simulate_queue(spec.params, spec.slots, seed, &trace);
    if (qa.defined()) {
      const double se_q0 = 3.0 * std::sqrt(qa.q0 * (1.0 - qa.q0) / spec.slots);
      std::printf("  %-14s %-14s %-14s\n", "metric", "analytic", "empirical");
      std::printf("  %-14s %-14.6g %-14.6g (+-%.2g)\n", "q0", qa.q0, sim.empty_fraction, se_q0);
      std::printf("  %-14s %-14.6g %-14.6g\n", "mean_length", qa.mean_length, sim.mean_length);
      std::printf("  %-14s %-14.6g %-14.6g\n", "departures", spec.params.arrival_rate,
                  sim.departure_rate);
      std::printf("  %-14s %-14.6g %-14.6g\n", "sojourn",
                  (1.0 - spec.params.arrival_rate) /
                      (spec.params.service_prob - spec.params.arrival_rate),
                  sim.mean_sojourn);
      std::printf("  sojourn counted as service_slot - arrival_slot\n");
    } else {
      std::printf("  empirical mean_length %.6g after %ld slots (not stationary)\n",
                  sim.mean_length, spec.slots);
    }
    std::vector<CsvRow> rows;
    for (const auto& t : trace)
      rows.push_back({std::to_string(t.slot), std::to_string(t.length),
                      t.arrival ? "1" : "0", t.departure ? "1" : "0"});
    emit_csv({"slot", "length", "arrival", "departure"}, rows,
             out_path(rc, "queue_trace_" + std::to_string(i) + ".csv"));
  }
}

void cmd_stable_capacity(const RunConfig& rc) {
  const StableCapacityReport rep = stable_system_capacity(rc.system, rc.profile, rc.tol);
  std::printf("receiver             %s\n", to_string(rc.system.receiver).c_str());
  std::printf("eta                  %.12g\n", rep.capacity.sir.eta);
  std::printf("load                 %.12g\n", rep.capacity.load);
  std::printf("spectral_efficiency  %.12g bits/s/Hz\n", rep.capacity.spectral_efficiency);
  std::printf("%-6s %-8s %-8s %-10s %-12s %-12s %-12s\n", "class", "lambda", "theta", "q0",
              "mean_len", "info_rate", "link_cap");
  for (const auto& c : rep.per_class)
    std::printf("%-6zu %-8.4g %-8.4g %-10.6g %-12.6g %-12.6g %-12.6g\n", c.index,
                c.arrival_rate, c.tx_prob, c.q0, c.mean_length, c.info_rate, c.link_capacity);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Large random-spreading CDMA random access: limit SIR, spectral efficiency, "
               "MAC optimization, finite-system and queue simulation"};
  app.require_subcommand(1);

  Flags f;
  app.add_option("--config", f.config_path, "JSON run configuration")->required();
  app.add_option("--out", f.out_dir, "output directory (overrides config)");
  app.add_option("--receiver", f.receiver, "mmse|decorrelator|mf (overrides config)");
  app.add_option("--grid-step", f.grid_step, "sweep grid step");
  app.add_option("--tol", f.tol, "solver tolerance");
  app.add_option("--seed", f.seed, "master RNG seed");
  app.add_option("--spreading-gain", f.spreading_gain, "simulator N");
  app.add_option("--slots", f.slots, "simulator slots per trial");
  app.add_option("--trials", f.trials, "simulator trial count");
  app.fallthrough();

  auto* sc_sir = app.add_subcommand("sir", "limit unit-power SIR");
  auto* sc_capacity = app.add_subcommand("capacity", "full capacity report");
  auto* sc_sweep = app.add_subcommand("sweep", "spectral efficiency over the MAC grid");
  auto* sc_optimize = app.add_subcommand("optimize", "search the optimal MAC");
  auto* sc_simulate = app.add_subcommand("simulate", "finite-system Monte Carlo");
  auto* sc_queue = app.add_subcommand("queue", "queue analytics vs simulation");
  auto* sc_stable = app.add_subcommand("stable-capacity", "stable-system capacity report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunConfig rc = resolve(f);
    if (sc_sir->parsed()) cmd_sir(rc);
    if (sc_capacity->parsed()) cmd_capacity(rc);
    if (sc_sweep->parsed()) cmd_sweep(rc);
    if (sc_optimize->parsed()) cmd_optimize(rc);
    if (sc_simulate->parsed()) cmd_simulate(rc);
    if (sc_queue->parsed()) cmd_queue(rc, f.seed.value_or(0));
    if (sc_stable->parsed()) cmd_stable_capacity(rc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "model-domain error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
