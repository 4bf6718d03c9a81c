#pragma once

#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/golden_section.hpp>
#include <bacnoma/rates.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <optional>
#include <vector>

namespace bacnoma {

/// Linear SNR targets: `gamma` makes t0*R_b equal the total data, and
/// `gamma0_tilde` is the SINR U_0 needs for its rate target.
struct FeasibilityThresholds {
  double gamma = 0.0;
  double gamma0_tilde = 0.0;
};

inline FeasibilityThresholds compute_thresholds(const ScenarioConfig& config) {
  const double ln2 = std::numbers::ln2;
  return {std::expm1(config.total_bits() / (config.t0_seconds * config.bandwidth_hz) * ln2),
          std::expm1(config.qos_rate_bps / config.bandwidth_hz * ln2)};
}

/// Smallest downlink power that meets the U_0 rate target with no backscatter.
inline double min_qos_power(const ChannelRealization& chan, double gamma0_tilde) {
  if (gamma0_tilde <= 0.0) return 0.0;
  if (chan.h0_gain_sq <= 0.0) return std::numeric_limits<double>::infinity();
  return gamma0_tilde * chan.noise_power_watts / chan.h0_gain_sq;
}

/// True when some P_0 <= P_0,max meets the downlink rate target.
inline bool qos_attainable(const ScenarioConfig& config, const ChannelRealization& chan) {
  return config.p0_max_watts * chan.h0_gain_sq >=
         compute_thresholds(config).gamma0_tilde * chan.noise_power_watts;
}

struct ReflectSum {
  double s_max = 0.0;               // sum_k p_{r,k} |h_k|^4
  std::vector<double> p_reflect;
};

/// Maximizes sum_k p_{r,k}|h_k|^4 over 0 <= p_{r,k} <= p0 subject to the U_0
/// rate target. This is a continuous knapsack, so the greedy fill by
/// |h_k|^4 / (gamma0_tilde |g_k|^2 |h_k|^2) is exact. Equal ratios go to the
/// lower index first.
inline ReflectSum max_reflect_sum(const ChannelRealization& chan, double p0, double gamma0_tilde) {
  const std::size_t n = chan.size();
  ReflectSum out{0.0, std::vector<double>(n, 0.0)};
  if (!(p0 > 0.0)) return out;

  auto value = [&](std::size_t k) { return chan.h_gain_sq[k] * chan.h_gain_sq[k]; };
  if (gamma0_tilde <= 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      out.p_reflect[k] = p0;
      out.s_max += p0 * value(k);
    }
    return out;
  }

  double budget = p0 * chan.h0_gain_sq - gamma0_tilde * chan.noise_power_watts;
  if (!(budget > 0.0)) return out;

  auto weight = [&](std::size_t k) { return gamma0_tilde * chan.g_gain_sq[k] * chan.h_gain_sq[k]; };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // |h|^4 / (|g|^2 |h|^2) = |h|^2 / |g|^2; the common gamma0_tilde factor is irrelevant.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return chan.h_gain_sq[a] * chan.g_gain_sq[b] > chan.h_gain_sq[b] * chan.g_gain_sq[a];
  });
  for (std::size_t k : order) {
    const double w = weight(k);
    const double take = std::min(p0, budget / w);
    out.p_reflect[k] = take;
    out.s_max += take * value(k);
    budget -= take * w;
    if (!(budget > 0.0)) break;
  }
  return out;
}

/// phi(P_0) = S_max(P_0) - gamma * (alpha P_0 |h_SI|^2 + sigma^2); concave in P_0.
inline double pure_feasibility_margin(const ScenarioConfig& config, const ChannelRealization& chan,
                                      const FeasibilityThresholds& th, double p0) {
  return max_reflect_sum(chan, p0, th.gamma0_tilde).s_max -
         th.gamma * backscatter_noise(config, chan, p0);
}

/// Iteration count of the golden-section searches over P_0.
inline constexpr std::size_t kGoldenIterations = 80;

/// Looks for an allocation that lets every device finish within t_0 by
/// backscatter alone. The returned allocation meets t_0 * R_b = total bits
/// with equality and has zero active power.
inline std::optional<PowerAllocation> solve_pure_feasibility(const ScenarioConfig& config,
                                                             const ChannelRealization& chan) {
  const auto th = compute_thresholds(config);
  const std::size_t n = chan.size();
  const double p0_min = min_qos_power(chan, th.gamma0_tilde);
  if (!(p0_min <= config.p0_max_watts)) return std::nullopt;

  if (th.gamma <= 0.0) return PowerAllocation::zeros(n, p0_min);

  const auto best = golden_section_maximize(
      [&](double p0) { return pure_feasibility_margin(config, chan, th, p0); }, p0_min,
      config.p0_max_watts, kGoldenIterations);
  if (!(best.value >= 0.0)) return std::nullopt;

  auto witness = max_reflect_sum(chan, best.argmax, th.gamma0_tilde);
  const double target = th.gamma * backscatter_noise(config, chan, best.argmax);
  const double scale = std::min(1.0, target / witness.s_max);
  PowerAllocation alloc = PowerAllocation::zeros(n, best.argmax);
  for (std::size_t k = 0; k < n; ++k) alloc.p_reflect_watts[k] = witness.p_reflect[k] * scale;
  return alloc;
}

}  // namespace bacnoma
