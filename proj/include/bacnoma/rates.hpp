#pragma once

#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/errors.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace bacnoma {

/// Decision variables. Per-device vectors follow the SIC order of the
/// ChannelRealization they were computed for.
struct PowerAllocation {
  double p0_watts = 0.0;
  std::vector<double> p_reflect_watts;  // eta_k * P_0
  std::vector<double> p_active_watts;

  /// Reflection coefficient of device k, 0 when the downlink is off.
  [[nodiscard]] double eta(std::size_t k) const {
    return p0_watts > 0.0 ? p_reflect_watts[k] / p0_watts : 0.0;
  }

  static PowerAllocation zeros(std::size_t num_bds, double p0 = 0.0) {
    return {p0, std::vector<double>(num_bds, 0.0), std::vector<double>(num_bds, 0.0)};
  }
};

struct RateReport {
  std::vector<double> r_b_bps;
  std::vector<double> r_a_bps;
  double r0_bps = 0.0;
  double sum_rb_bps = 0.0;
  double sum_ra_bps = 0.0;
};

/// B * log2(1 + snr). Negative SNR beyond rounding noise means a caller
/// produced an impossible power or interference term.
inline double shannon_rate(double bandwidth_hz, double snr) {
  if (!(snr >= -1e-12)) {
    throw InternalConsistencyError("rate argument below 1 (snr = " + std::to_string(snr) + ")");
  }
  if (snr <= 0.0) return 0.0;
  return bandwidth_hz * std::log1p(snr) / std::numbers::ln2;
}

/// Receive-side impairment seen by backscatter decoding: alpha*P_0*|h_SI|^2 + sigma^2.
inline double backscatter_noise(const ScenarioConfig& config, const ChannelRealization& chan,
                                double p0) {
  return config.si_residual_alpha * p0 * config.si_channel_gain + chan.noise_power_watts;
}

/// Weighted reflect power sum S = sum_k p_{r,k} |h_k|^4.
inline double reflect_signal_sum(const ChannelRealization& chan,
                                 const std::vector<double>& p_reflect) {
  double s = 0.0;
  for (std::size_t k = 0; k < chan.size(); ++k) s += p_reflect[k] * chan.h_gain_sq[k] * chan.h_gain_sq[k];
  return s;
}

/// Per-device backscatter rates under SIC in descending channel order.
inline std::vector<double> backscatter_rates(const ScenarioConfig& config,
                                             const ChannelRealization& chan,
                                             const PowerAllocation& alloc) {
  const std::size_t n = chan.size();
  std::vector<double> rates(n, 0.0);
  const double floor = backscatter_noise(config, chan, alloc.p0_watts);
  double weaker = 0.0;  // sum over j > k, accumulated from the back
  for (std::size_t i = n; i-- > 0;) {
    const double signal = alloc.p_reflect_watts[i] * chan.h_gain_sq[i] * chan.h_gain_sq[i];
    rates[i] = shannon_rate(config.bandwidth_hz, signal / (weaker + floor));
    weaker += signal;
  }
  return rates;
}

/// Per-device active NOMA uplink rates.
inline std::vector<double> active_rates(const ScenarioConfig& config,
                                        const ChannelRealization& chan,
                                        const PowerAllocation& alloc) {
  const std::size_t n = chan.size();
  std::vector<double> rates(n, 0.0);
  double weaker = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double signal = alloc.p_active_watts[i] * chan.h_gain_sq[i];
    rates[i] = shannon_rate(config.bandwidth_hz, signal / (weaker + chan.noise_power_watts));
    weaker += signal;
  }
  return rates;
}

/// Sum over devices of p_{r,k} |g_k|^2 |h_k|^2: backscatter interference at U_0.
inline double downlink_interference(const ChannelRealization& chan,
                                    const std::vector<double>& p_reflect) {
  double s = 0.0;
  for (std::size_t k = 0; k < chan.size(); ++k) s += p_reflect[k] * chan.g_gain_sq[k] * chan.h_gain_sq[k];
  return s;
}

/// Rate of the downlink user U_0 with backscatter interference.
inline double downlink_rate(const ScenarioConfig& config, const ChannelRealization& chan,
                            const PowerAllocation& alloc) {
  const double interference = downlink_interference(chan, alloc.p_reflect_watts);
  return shannon_rate(config.bandwidth_hz, alloc.p0_watts * chan.h0_gain_sq /
                                               (interference + chan.noise_power_watts));
}

/// Closed-form backscatter sum rate R_b.
inline double sum_backscatter_rate(const ScenarioConfig& config, const ChannelRealization& chan,
                                   double p0, const std::vector<double>& p_reflect) {
  return shannon_rate(config.bandwidth_hz,
                      reflect_signal_sum(chan, p_reflect) / backscatter_noise(config, chan, p0));
}

/// Closed-form active sum rate R_a.
inline double sum_active_rate(const ScenarioConfig& config, const ChannelRealization& chan,
                              const std::vector<double>& p_active) {
  double s = 0.0;
  for (std::size_t k = 0; k < chan.size(); ++k) s += p_active[k] * chan.h_gain_sq[k];
  return shannon_rate(config.bandwidth_hz, s / chan.noise_power_watts);
}

inline RateReport compute_rates(const ScenarioConfig& config, const ChannelRealization& chan,
                                const PowerAllocation& alloc) {
  RateReport r;
  r.r_b_bps = backscatter_rates(config, chan, alloc);
  r.r_a_bps = active_rates(config, chan, alloc);
  r.r0_bps = downlink_rate(config, chan, alloc);
  r.sum_rb_bps = sum_backscatter_rate(config, chan, alloc.p0_watts, alloc.p_reflect_watts);
  r.sum_ra_bps = sum_active_rate(config, chan, alloc.p_active_watts);
  return r;
}

/// Duration of the active phase when every device finishes together:
/// max(0, (total_bits - t0*R_b) / R_a). Infinite when data remains and R_a = 0.
inline double remaining_delay(double total_bits, double t0, double sum_rb, double sum_ra) {
  const double residual = total_bits - t0 * sum_rb;
  if (residual <= 0.0) return 0.0;
  if (sum_ra <= 0.0) return std::numeric_limits<double>::infinity();
  return residual / sum_ra;
}

}  // namespace bacnoma
