#pragma once

#include <bacnoma/baseline.hpp>
#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/errors.hpp>
#include <bacnoma/golden_section.hpp>
#include <bacnoma/pure_bac.hpp>
#include <bacnoma/rates.hpp>
#include <bacnoma/solution.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

namespace bacnoma {

/// Maximizer of the quadratic transform for fixed powers:
/// y* = sqrt(S) / (alpha P_0 |h_SI|^2 + sigma^2).
inline double optimal_y(const ScenarioConfig& config, const ChannelRealization& chan, double p0,
                        const std::vector<double>& p_reflect) {
  return std::sqrt(reflect_signal_sum(chan, p_reflect)) / backscatter_noise(config, chan, p0);
}

/// Quadratic-transform surrogate of the backscatter SNR: 2y sqrt(S) - y^2 D.
/// At y = optimal_y it equals S / D.
inline double transformed_snr(const ScenarioConfig& config, const ChannelRealization& chan,
                              double y, double p0, double s) {
  return 2.0 * y * std::sqrt(s) - y * y * backscatter_noise(config, chan, p0);
}

/// Per-device active power that solves the active part of the subproblem for
/// fixed mu. The objective falls as sum p_{a,k}|h_k|^2 grows and each device
/// only has its own box min(P_a,max, E_max/mu), so the corner is optimal.
inline std::vector<double> optimal_active_powers(double mu, const ScenarioConfig& config) {
  if (!(mu > 0.0)) throw InvalidParameter("optimal_active_powers: mu must be > 0");
  const double p = std::min(config.pa_max_watts, config.energy_budget_joules / mu);
  return std::vector<double>(config.num_bds, p);
}

struct ReflectChoice {
  double p0_watts = 0.0;
  std::vector<double> p_reflect_watts;
  double log_argument = 1.0;  // 1 + transformed SNR at the chosen point
  bool feasible = false;
};

/// Minimizes -t0 B log2(1 + 2y sqrt(S) - y^2 D(P_0)) over (P_0, p_r) under the
/// U_0 rate target and 0 <= p_{r,k} <= P_0. For each P_0 the best p_r is the
/// knapsack solution; the remaining function of P_0 is concave (sqrt of a
/// concave function minus a linear one) and is searched by golden section.
/// With y = 0 every point ties and P_0,max with its knapsack witness is returned.
inline ReflectChoice solve_reflect_subproblem(const ScenarioConfig& config,
                                              const ChannelRealization& chan, double y) {
  const auto th = compute_thresholds(config);
  const std::size_t n = chan.size();
  const double p0_min = min_qos_power(chan, th.gamma0_tilde);
  if (!(p0_min <= config.p0_max_watts)) return {0.0, std::vector<double>(n, 0.0), 1.0, false};

  double p0 = config.p0_max_watts;
  if (y > 0.0) {
    const auto best = golden_section_maximize(
        [&](double p) {
          return transformed_snr(config, chan, y, p, max_reflect_sum(chan, p, th.gamma0_tilde).s_max);
        },
        p0_min, config.p0_max_watts, kGoldenIterations);
    if (!(1.0 + best.value > 0.0)) return {0.0, std::vector<double>(n, 0.0), 1.0, false};
    p0 = best.argmax;
  }
  auto witness = max_reflect_sum(chan, p0, th.gamma0_tilde);
  const double arg = 1.0 + transformed_snr(config, chan, y, p0, witness.s_max);
  return {p0, std::move(witness.p_reflect), arg, true};
}

/// F(mu) = total bits - t0 R_b - mu R_a.
inline double dinkelbach_objective(const ScenarioConfig& config, const ChannelRealization& chan,
                                   double mu, const PowerAllocation& alloc) {
  return config.total_bits() -
         config.t0_seconds * sum_backscatter_rate(config, chan, alloc.p0_watts, alloc.p_reflect_watts) -
         mu * sum_active_rate(config, chan, alloc.p_active_watts);
}

/// Ratio (total bits - t0 R_b) / R_a at `alloc`, without clamping at zero.
inline double update_mu(const ScenarioConfig& config, const ChannelRealization& chan,
                        const PowerAllocation& alloc) {
  const double num = config.total_bits() -
                     config.t0_seconds *
                         sum_backscatter_rate(config, chan, alloc.p0_watts, alloc.p_reflect_watts);
  const double den = sum_active_rate(config, chan, alloc.p_active_watts);
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

/// Full objective of the transformed subproblem at `alloc` for fixed (y, mu):
/// total bits - mu R_a - t0 B log2(1 + 2y sqrt(S) - y^2 D); +inf where the
/// log argument is not positive.
inline double transformed_objective(const ScenarioConfig& config, const ChannelRealization& chan,
                                    double y, double mu, const PowerAllocation& alloc) {
  const double s = reflect_signal_sum(chan, alloc.p_reflect_watts);
  const double snr = transformed_snr(config, chan, y, alloc.p0_watts, s);
  if (!(snr > -1.0)) return std::numeric_limits<double>::infinity();
  return config.total_bits() - mu * sum_active_rate(config, chan, alloc.p_active_watts) -
         config.t0_seconds * config.bandwidth_hz * std::log1p(snr) / std::numbers::ln2;
}

/// Completes a reflect decision (P_0, p_r) with the energy-consistent active
/// phase and reports its delay.
inline DelaySolution complete_with_active_phase(const ScenarioConfig& config,
                                                const ChannelRealization& chan, double p0,
                                                std::vector<double> p_reflect) {
  const double rb = sum_backscatter_rate(config, chan, p0, p_reflect);
  const auto phase = solve_active_phase(config, chan, config.total_bits() - config.t0_seconds * rb);
  PowerAllocation alloc{p0, std::move(p_reflect), phase.p_active_watts};
  return evaluate_solution(config, chan, std::move(alloc), Scheme::Hybrid);
}

/// Dinkelbach outer loop with one quadratic-transform update per iteration.
/// Runs regardless of whether backscatter alone would suffice.
///
/// mu starts at the ratio of the initial point (P_0,max, knapsack witness,
/// p_a = P_a,max). Each iteration: y from the current powers, (P_0, p_r) from
/// the reflect subproblem, p_a from mu, F(mu), then the mu update. Stops when
/// |F| <= epsilon. The returned allocation is the incumbent with the smallest
/// delay after completing each iterate with an energy-consistent active phase.
inline DelaySolution run_hybrid(const ScenarioConfig& config, const ChannelRealization& chan) {
  const std::size_t n = chan.size();
  const auto th = compute_thresholds(config);
  const bool qos_ok = qos_attainable(config, chan);

  double p0 = config.p0_max_watts;
  std::vector<double> p_reflect =
      qos_ok ? max_reflect_sum(chan, p0, th.gamma0_tilde).p_reflect : std::vector<double>(n, 0.0);

  DelaySolution best = complete_with_active_phase(config, chan, p0, p_reflect);
  best.qos_attainable = qos_ok;

  const double residual0 =
      config.total_bits() - config.t0_seconds * sum_backscatter_rate(config, chan, p0, p_reflect);
  const double full_rate =
      sum_active_rate(config, chan, std::vector<double>(n, config.pa_max_watts));
  if (residual0 <= 0.0) {
    best.converged = true;
    return best;
  }
  if (!(full_rate > 0.0)) return best;

  std::vector<DinkelbachState> trace;
  double mu = residual0 / full_rate;
  bool converged = false;
  std::size_t iteration = 0;
  while (iteration < config.max_iterations) {
    ++iteration;
    const double y = optimal_y(config, chan, p0, p_reflect);
    auto choice = solve_reflect_subproblem(config, chan, y);
    if (choice.feasible) {
      p0 = choice.p0_watts;
      p_reflect = std::move(choice.p_reflect_watts);
    } else {
      p0 = config.p0_max_watts;
      p_reflect.assign(n, 0.0);
    }
    const PowerAllocation alloc{p0, p_reflect, optimal_active_powers(mu, config)};
    const double f = dinkelbach_objective(config, chan, mu, alloc);
    const double mu_next = update_mu(config, chan, alloc);

    auto candidate = complete_with_active_phase(config, chan, p0, p_reflect);
    if (candidate.total_delay_s < best.total_delay_s) best = std::move(candidate);
    trace.push_back({iteration, mu, mu_next, y, f, best.total_delay_s});

    if (std::abs(f) <= config.epsilon_tolerance || !(mu_next > 0.0)) {
      converged = true;
      break;
    }
    if (!std::isfinite(mu_next)) break;
    mu = mu_next;
  }

  best.scheme = Scheme::Hybrid;
  best.qos_attainable = qos_ok;
  best.converged = converged;
  best.iterations = iteration;
  best.trace = std::move(trace);
  return best;
}

/// Minimum offloading delay: pure backscatter when every device can finish
/// within t_0, otherwise the hybrid iteration.
inline DelaySolution minimize_delay(const ScenarioConfig& config, const ChannelRealization& chan) {
  if (auto pure = solve_pure_feasibility(config, chan)) {
    auto sol = evaluate_solution(config, chan, std::move(*pure), Scheme::PureBac);
    sol.t_a_s = 0.0;
    sol.total_delay_s = config.t0_seconds;
    sol.converged = true;
    sol.qos_attainable = true;
    return sol;
  }
  return run_hybrid(config, chan);
}

}  // namespace bacnoma
