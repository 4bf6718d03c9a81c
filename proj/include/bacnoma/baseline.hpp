#pragma once

#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/pure_bac.hpp>
#include <bacnoma/rates.hpp>
#include <bacnoma/solution.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

namespace bacnoma {

/// Active phase that is consistent with the energy budget: t_a and a common
/// per-device power p_a = min(P_a,max, E_max / t_a) with t_a * R_a(p_a) equal
/// to the residual data.
struct ActivePhase {
  double t_a_s = 0.0;
  std::vector<double> p_active_watts;

  [[nodiscard]] bool finite() const { return std::isfinite(t_a_s); }
};

inline constexpr double kBisectionRelTol = 1e-10;
inline constexpr std::size_t kBisectionMaxIter = 200;

/// Per-device power allowed by the energy budget for an active phase of `t_a` seconds.
inline double energy_limited_power(const ScenarioConfig& config, double t_a) {
  if (t_a <= 0.0) return config.pa_max_watts;
  return std::min(config.pa_max_watts, config.energy_budget_joules / t_a);
}

/// Solves t = residual / R_a(p(t)) with p(t) = min(P_a,max, E_max / t).
/// t * R_a(p(t)) is increasing in t and saturates at B E_max sum|h|^2 / (sigma^2 ln 2),
/// so a root exists iff the residual is below that limit. The returned power
/// is evaluated at the upper bisection bracket, so t_a * p_a <= E_max holds
/// exactly for the reported t_a = residual / R_a(p_a).
inline ActivePhase solve_active_phase(const ScenarioConfig& config, const ChannelRealization& chan,
                                      double residual_bits) {
  const std::size_t n = chan.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (residual_bits <= 0.0) return {0.0, std::vector<double>(n, 0.0)};

  auto rate_at = [&](double p) {
    return sum_active_rate(config, chan, std::vector<double>(n, p));
  };
  auto phase_at = [&](double p) {
    return ActivePhase{remaining_delay(residual_bits, 0.0, 0.0, rate_at(p)),
                       std::vector<double>(n, p)};
  };

  const double full_rate = rate_at(config.pa_max_watts);
  if (!(full_rate > 0.0)) return {inf, std::vector<double>(n, config.pa_max_watts)};
  double lo = residual_bits / full_rate;
  if (config.pa_max_watts * lo <= config.energy_budget_joules) return phase_at(config.pa_max_watts);

  double gain_sum = 0.0;
  for (double h : chan.h_gain_sq) gain_sum += h;
  const double limit = config.bandwidth_hz * config.energy_budget_joules * gain_sum /
                       (chan.noise_power_watts * std::numbers::ln2);
  if (!(residual_bits < limit)) return {inf, std::vector<double>(n, 0.0)};

  auto excess = [&](double t) { return t * rate_at(energy_limited_power(config, t)) - residual_bits; };
  double hi = lo;
  while (excess(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return {inf, std::vector<double>(n, 0.0)};
  }
  for (std::size_t i = 0; i < kBisectionMaxIter && hi - lo > kBisectionRelTol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return phase_at(energy_limited_power(config, hi));
}

/// Pure NOMA uplink benchmark: no backscatter during t_0, so every bit goes
/// through the energy-limited active phase. The downlink stays at P_0,max.
inline DelaySolution pure_noma_delay(const ScenarioConfig& config, const ChannelRealization& chan) {
  const auto phase = solve_active_phase(config, chan, config.total_bits());
  PowerAllocation alloc = PowerAllocation::zeros(chan.size(), config.p0_max_watts);
  alloc.p_active_watts = phase.p_active_watts;
  auto sol = evaluate_solution(config, chan, std::move(alloc), Scheme::Baseline);
  sol.converged = phase.finite();
  sol.qos_attainable = qos_attainable(config, chan);
  return sol;
}

}  // namespace bacnoma
