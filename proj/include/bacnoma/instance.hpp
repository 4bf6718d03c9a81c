#pragma once

#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/errors.hpp>
#include <bacnoma/hybrid.hpp>
#include <bacnoma/pure_bac.hpp>

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

namespace bacnoma {

/// Self-contained description of one transformed subproblem (fixed y and mu),
/// exchanged as JSON with external solvers. All quantities in SI units.
///
/// The U_0 constraint reads
///   P_0 h0_sq - gamma0_tilde * (sum_k p_{r,k} w_qos[k] + sigma2) >= 0,
/// with w_qos[k] = |g_k|^2 |h_k|^2, h4[k] = |h_k|^4 and h2[k] = |h_k|^2.
struct HybridInstance {
  double y = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
  double alpha = 0.0;
  double h_si_sq = 1.0;
  double p0_max = 0.0;
  double pa_max = 0.0;
  double e_max = 0.0;
  double gamma0_tilde = 0.0;
  std::vector<double> h4;
  std::vector<double> h2;
  std::vector<double> w_qos;
  double h0_sq = 0.0;
  double L_tilde = 0.0;
  double t0 = 0.0;
  double B = 0.0;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(HybridInstance, y, mu, sigma2, alpha, h_si_sq, p0_max, pa_max,
                                   e_max, gamma0_tilde, h4, h2, w_qos, h0_sq, L_tilde, t0, B)

inline HybridInstance make_instance(const ScenarioConfig& config, const ChannelRealization& chan,
                                    double y, double mu) {
  HybridInstance inst;
  inst.y = y;
  inst.mu = mu;
  inst.sigma2 = chan.noise_power_watts;
  inst.alpha = config.si_residual_alpha;
  inst.h_si_sq = config.si_channel_gain;
  inst.p0_max = config.p0_max_watts;
  inst.pa_max = config.pa_max_watts;
  inst.e_max = config.energy_budget_joules;
  inst.gamma0_tilde = compute_thresholds(config).gamma0_tilde;
  for (std::size_t k = 0; k < chan.size(); ++k) {
    inst.h4.push_back(chan.h_gain_sq[k] * chan.h_gain_sq[k]);
    inst.h2.push_back(chan.h_gain_sq[k]);
    inst.w_qos.push_back(chan.g_gain_sq[k] * chan.h_gain_sq[k]);
  }
  inst.h0_sq = chan.h0_gain_sq;
  inst.L_tilde = config.total_bits();
  inst.t0 = config.t0_seconds;
  inst.B = config.bandwidth_hz;
  return inst;
}

/// Rebuilds a scenario and channel that reproduce the instance. The data
/// volume is spread evenly over the devices; only its total matters here.
/// The noise density is back-computed for completeness, and the channel
/// carries sigma2 verbatim.
inline std::pair<ScenarioConfig, ChannelRealization> instance_problem(const HybridInstance& inst) {
  const std::size_t n = inst.h2.size();
  if (n == 0 || inst.h4.size() != n || inst.w_qos.size() != n) {
    throw InvalidParameter("instance: h2, h4 and w_qos must be non-empty and equally long");
  }
  ScenarioConfig config;
  config.bandwidth_hz = inst.B;
  config.noise_density_dbm_per_hz = 10.0 * std::log10(inst.sigma2 / inst.B) + 30.0;
  config.num_bds = n;
  config.data_bits_per_bd.assign(n, inst.L_tilde / static_cast<double>(n));
  config.t0_seconds = inst.t0;
  config.p0_max_watts = inst.p0_max;
  config.pa_max_watts = inst.pa_max;
  config.energy_budget_joules = inst.e_max;
  config.qos_rate_bps = inst.B * std::log1p(inst.gamma0_tilde) / std::numbers::ln2;
  config.si_residual_alpha = inst.alpha;
  config.si_channel_gain = inst.h_si_sq;
  validate(config);

  ChannelRealization chan;
  chan.h_gain_sq = inst.h2;
  for (std::size_t k = 0; k < n; ++k) {
    chan.g_gain_sq.push_back(inst.h2[k] > 0.0 ? inst.w_qos[k] / inst.h2[k] : 0.0);
  }
  chan.h0_gain_sq = inst.h0_sq;
  chan.noise_power_watts = inst.sigma2;
  chan.bd_distances_m.assign(n, 0.0);
  chan.bd_u0_distances_m.assign(n, 0.0);
  chan.permutation.resize(n);
  for (std::size_t k = 0; k < n; ++k) chan.permutation[k] = k;
  return {std::move(config), std::move(chan)};
}

struct InstanceSolution {
  double objective_bits = 0.0;
  PowerAllocation allocation;
  bool feasible = false;
};

/// Solves the transformed subproblem stored in `inst` with this library's
/// solvers; the reference answer an external solver is compared against.
inline InstanceSolution solve_instance(const HybridInstance& inst) {
  const auto [config, chan] = instance_problem(inst);
  auto choice = solve_reflect_subproblem(config, chan, inst.y);
  InstanceSolution out;
  out.feasible = choice.feasible;
  out.allocation.p0_watts = choice.feasible ? choice.p0_watts : config.p0_max_watts;
  out.allocation.p_reflect_watts = choice.feasible ? choice.p_reflect_watts
                                                   : std::vector<double>(chan.size(), 0.0);
  out.allocation.p_active_watts = inst.mu > 0.0 ? optimal_active_powers(inst.mu, config)
                                                : std::vector<double>(chan.size(), config.pa_max_watts);
  out.objective_bits = transformed_objective(config, chan, inst.y, inst.mu, out.allocation);
  return out;
}

inline void write_instance(const std::string& path, const HybridInstance& inst) {
  std::ofstream out(path);
  if (!out) throw InvalidParameter("cannot write instance file '" + path + "'");
  out << nlohmann::json(inst).dump(2) << '\n';
}

inline HybridInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open instance file '" + path + "'");
  try {
    return nlohmann::json::parse(in).get<HybridInstance>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter("malformed instance file '" + path + "': " + e.what());
  }
}

}  // namespace bacnoma
