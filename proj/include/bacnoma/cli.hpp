#pragma once

#include <bacnoma/audit.hpp>
#include <bacnoma/baseline.hpp>
#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/errors.hpp>
#include <bacnoma/experiments.hpp>
#include <bacnoma/hybrid.hpp>
#include <bacnoma/instance.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bacnoma::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInvalidConfig = 2, kSolverSentinel = 3 };

inline nlohmann::json solution_json(const ScenarioConfig& config, const ChannelRealization& chan,
                                    const DelaySolution& sol) {
  using nlohmann::json;
  const auto audit = audit_solution(config, chan, sol);
  std::vector<double> eta;
  for (std::size_t k = 0; k < chan.size(); ++k) eta.push_back(sol.allocation.eta(k));
  return json{
      {"scheme", std::string(to_string(sol.scheme))},
      {"total_delay_s", sol.total_delay_s},
      {"t_a_s", sol.t_a_s},
      {"t0_s", config.t0_seconds},
      {"converged", sol.converged},
      {"iterations", sol.iterations},
      {"qos_attainable", sol.qos_attainable},
      {"device_order", chan.permutation},
      {"allocation",
       {{"p0_watts", sol.allocation.p0_watts},
        {"p_reflect_watts", sol.allocation.p_reflect_watts},
        {"p_active_watts", sol.allocation.p_active_watts},
        {"eta", eta}}},
      {"rates",
       {{"r_b_bps", sol.rates.r_b_bps},
        {"r_a_bps", sol.rates.r_a_bps},
        {"r0_bps", sol.rates.r0_bps},
        {"sum_rb_bps", sol.rates.sum_rb_bps},
        {"sum_ra_bps", sol.rates.sum_ra_bps}}},
      {"constraints",
       {{"passed", audit.passed()},
        {"failure", audit.failure},
        {"qos_margin_rel", audit.qos_margin_rel},
        {"energy_ratio_max", audit.energy_ratio_max},
        {"qos_ok", audit.qos_ok},
        {"energy_ok", audit.energy_ok},
        {"active_box_ok", audit.active_box_ok},
        {"downlink_box_ok", audit.downlink_box_ok},
        {"reflect_box_ok", audit.reflect_box_ok}}},
  };
}

/// Evenly spaced grid from `from` to `to` with `steps` points; one point is `from`.
inline std::vector<double> linear_grid(double from, double to, std::size_t steps) {
  std::vector<double> grid;
  if (steps == 1) return {from};
  for (std::size_t i = 0; i < steps; ++i) {
    grid.push_back(from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return grid;
}

/// Entry point of the `bacnoma` tool. Output goes to `out`, diagnostics to `err`.
///
/// Config precedence, lowest first: built-in defaults, --config file, --set
/// assignments, then command flags (--alpha, the sweep range).
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delay minimization for hybrid backscatter/NOMA offloading"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 1;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key = value scenario file");
  app.add_option("--seed", seed, "channel seed (master seed for sweeps)");
  app.add_option("--set", overrides, "override one config key, as key=value");

  auto* single = app.add_subcommand("single", "solve one channel draw, print JSON");

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over data length, print CSV");
  double from = 2e5, to = 3e6;
  std::size_t steps = 5, realizations = 1000;
  sweep_cmd->add_option("--from", from, "first data length per device, bits");
  sweep_cmd->add_option("--to", to, "last data length per device, bits");
  sweep_cmd->add_option("--steps", steps, "grid points")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--realizations", realizations, "draws per grid point")->check(CLI::PositiveNumber);

  auto* conv = app.add_subcommand("convergence", "iterate trace of one draw, print CSV");
  std::optional<double> alpha;
  conv->add_option("--alpha", alpha, "residual self-interference level");

  auto* dump = app.add_subcommand("dump-instance", "write the subproblem of one iteration as JSON");
  std::size_t iteration = 1;
  std::string out_path;
  dump->add_option("--iteration", iteration, "outer iteration, 1-based")->check(CLI::PositiveNumber);
  dump->add_option("--out", out_path, "output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsage;
  }

  ScenarioConfig config;
  try {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InvalidParameter("cannot open config file '" + config_path + "'");
      kv = parse_assignments(in);
    }
    for (const auto& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidParameter("--set expects key=value, got '" + item + "'");
      kv[std::string(detail::trim(std::string_view(item).substr(0, eq)))] =
          std::string(detail::trim(std::string_view(item).substr(eq + 1)));
    }
    config = apply_assignments(ScenarioConfig{}, kv);
    if (alpha) config.si_residual_alpha = *alpha;
    validate(config);
  } catch (const InvalidParameter& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  }

  try {
    if (*single) {
      const auto chan = sample_channels(config, seed);
      const auto sol = minimize_delay(config, chan);
      auto doc = solution_json(config, chan, sol);
      doc["seed"] = seed;
      doc["baseline_total_delay_s"] = pure_noma_delay(config, chan).total_delay_s;
      out << doc.dump(2) << '\n';
      return sol.infinite() ? kSolverSentinel : kOk;
    }
    if (*sweep_cmd) {
      write_sweep_csv(out, sweep_data_length(config, linear_grid(from, to, steps), realizations, seed));
      return kOk;
    }
    if (*conv) {
      write_trace_csv(out, convergence_trace(config, seed));
      return kOk;
    }
    if (*dump) {
      const auto chan = sample_channels(config, seed);
      const auto run = run_hybrid(config, chan);
      HybridInstance inst;
      if (run.trace.empty()) {
        inst = make_instance(config, chan, optimal_y(config, chan, run.allocation.p0_watts,
                                                     run.allocation.p_reflect_watts),
                             0.0);
      } else {
        const auto& state = run.trace[std::min(iteration, run.trace.size()) - 1];
        inst = make_instance(config, chan, state.y, state.mu_fixed);
      }
      write_instance(out_path, inst);
      return kOk;
    }
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }
  return kUsage;
}

}  // namespace bacnoma::cli
