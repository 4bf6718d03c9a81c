#pragma once

#include <bacnoma/baseline.hpp>
#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/pure_bac.hpp>
#include <bacnoma/rates.hpp>
#include <bacnoma/solution.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace bacnoma {

/// Tolerances of the constraint audit, relative to the bound they guard.
struct AuditTolerances {
  double qos_rel = 1e-6;
  double energy_rel = 1e-4;
  double box_rel = 1e-12;
};

/// Upper bound on the backscatter sum rate over every allowed (P_0, p_r).
/// S(P_0) is non-decreasing and the impairment term is increasing, so on each
/// cell [P_i, P_{i+1}] of a grid the ratio S/D is at most S(P_{i+1}) / D(P_i).
inline double backscatter_rate_upper_bound(const ScenarioConfig& config,
                                           const ChannelRealization& chan,
                                           std::size_t cells = 4096) {
  const double g0 = compute_thresholds(config).gamma0_tilde;
  const double lo = min_qos_power(chan, g0);
  const double hi = config.p0_max_watts;
  if (!(lo <= hi)) return 0.0;
  double best = 0.0;
  double prev = lo;
  for (std::size_t i = 1; i <= cells; ++i) {
    const double next = i == cells ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
    best = std::max(best, max_reflect_sum(chan, next, g0).s_max / backscatter_noise(config, chan, prev));
    prev = next;
  }
  return shannon_rate(config.bandwidth_hz, best);
}

/// Largest number of bits the active phase can carry for any duration:
/// t R_a(E_max / t) -> B E_max sum|h_k|^2 / (sigma^2 ln 2) as t grows, and
/// t R_a(P_a,max) is below that whenever P_a,max binds.
inline double active_phase_bit_limit(const ScenarioConfig& config, const ChannelRealization& chan) {
  double gain_sum = 0.0;
  for (double h : chan.h_gain_sq) gain_sum += h;
  return config.bandwidth_hz * config.energy_budget_joules * gain_sum /
         (chan.noise_power_watts * std::numbers::ln2);
}

struct ConstraintAudit {
  double qos_margin_rel = 0.0;       // (r_0 - gamma_0) / gamma_0
  double energy_ratio_max = 0.0;     // max_k t_a p_{a,k} / E_max
  bool qos_ok = false;               // C1
  bool energy_ok = false;            // C2
  bool active_box_ok = false;        // C3
  bool downlink_box_ok = false;      // C4
  bool reflect_box_ok = false;       // C5
  bool delay_consistent = false;     // reported t_a matches the allocation
  bool qos_infeasibility_certified = false;
  bool energy_infeasibility_certified = false;
  std::string failure;

  [[nodiscard]] bool passed() const { return failure.empty(); }
};

/// Checks a solution against the original problem's constraints. When the
/// problem itself has no feasible point (U_0 target unreachable at P_0,max, or
/// no finite active phase fits the energy budget) the solver's flag or
/// sentinel is accepted only if an independent certificate confirms it.
inline ConstraintAudit audit_solution(const ScenarioConfig& config, const ChannelRealization& chan,
                                      const DelaySolution& sol, const AuditTolerances& tol = {}) {
  ConstraintAudit a;
  const auto& alloc = sol.allocation;
  const std::size_t n = chan.size();
  auto fail = [&a](const std::string& why) {
    if (a.failure.empty()) a.failure = why;
  };

  const double r0 = downlink_rate(config, chan, alloc);
  a.qos_margin_rel = config.qos_rate_bps > 0.0 ? (r0 - config.qos_rate_bps) / config.qos_rate_bps : 0.0;
  a.qos_infeasibility_certified = !qos_attainable(config, chan);
  a.qos_ok = r0 >= config.qos_rate_bps * (1.0 - tol.qos_rel);
  if (sol.scheme != Scheme::Baseline && !a.qos_ok) {
    if (sol.qos_attainable) fail("C1: downlink rate below target");
    else if (!a.qos_infeasibility_certified) fail("C1: target reported unreachable but P_0,max reaches it");
  }
  if (sol.qos_attainable == a.qos_infeasibility_certified) fail("qos_attainable flag disagrees with certificate");

  a.active_box_ok = a.downlink_box_ok = a.reflect_box_ok = true;
  const double p0_slack = config.p0_max_watts * tol.box_rel;
  if (!(alloc.p0_watts >= 0.0 && alloc.p0_watts <= config.p0_max_watts + p0_slack)) {
    a.downlink_box_ok = false;
    fail("C4: P_0 outside [0, P_0,max]");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double pa = alloc.p_active_watts[k];
    const double pr = alloc.p_reflect_watts[k];
    if (!(pa >= 0.0 && pa <= config.pa_max_watts * (1.0 + tol.box_rel))) {
      a.active_box_ok = false;
      fail("C3: active power outside [0, P_a,max]");
    }
    if (!(pr >= 0.0 && pr <= alloc.p0_watts * (1.0 + tol.box_rel))) {
      a.reflect_box_ok = false;
      fail("C5: reflection coefficient outside [0, 1]");
    }
  }

  if (sol.infinite()) {
    // The baseline has no backscatter phase, so all data goes through the active phase.
    const double backscatter_bits = sol.scheme == Scheme::Baseline
                                        ? 0.0
                                        : config.t0_seconds * backscatter_rate_upper_bound(config, chan);
    const double best_residual = config.total_bits() - backscatter_bits;
    a.energy_infeasibility_certified = best_residual >= active_phase_bit_limit(config, chan);
    a.energy_ok = a.energy_infeasibility_certified;
    a.energy_ratio_max = std::numeric_limits<double>::infinity();
    if (!a.energy_ok) fail("infinite delay reported for an instance with a finite solution");
    a.delay_consistent = true;
    return a;
  }

  for (std::size_t k = 0; k < n; ++k) {
    const double used = sol.t_a_s * alloc.p_active_watts[k];
    const double ratio = config.energy_budget_joules > 0.0 ? used / config.energy_budget_joules
                                                           : (used > 0.0 ? 1e300 : 0.0);
    a.energy_ratio_max = std::max(a.energy_ratio_max, ratio);
  }
  a.energy_ok = a.energy_ratio_max <= 1.0 + tol.energy_rel;
  if (!a.energy_ok) fail("C2: active-phase energy above budget");

  const auto& rates = sol.rates;
  if (sol.scheme == Scheme::PureBac) {
    a.delay_consistent = sol.t_a_s == 0.0 &&
                         config.t0_seconds * rates.sum_rb_bps >= config.total_bits() * (1.0 - 1e-9);
  } else {
    a.delay_consistent = sol.t_a_s == remaining_delay(config.total_bits(), config.t0_seconds,
                                                      rates.sum_rb_bps, rates.sum_ra_bps);
  }
  if (sol.total_delay_s != config.t0_seconds + sol.t_a_s) a.delay_consistent = false;
  if (!a.delay_consistent) fail("reported delay does not match the allocation");
  return a;
}

}  // namespace bacnoma
