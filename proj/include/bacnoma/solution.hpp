#pragma once

#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/rates.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

namespace bacnoma {

enum class Scheme { PureBac, Hybrid, Baseline };

constexpr std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::PureBac: return "pure-bac";
    case Scheme::Hybrid: return "hybrid";
    case Scheme::Baseline: return "baseline";
  }
  return "unknown";
}

/// One outer iteration of the Dinkelbach loop.
struct DinkelbachState {
  std::size_t iteration = 0;
  double mu_fixed = 0.0; // mu held fixed in this iteration's subproblem, seconds
  double mu = 0.0;       // ratio value after this iteration's update, seconds
  double y = 0.0;        // quadratic-transform auxiliary used in this iteration
  double f_value = 0.0;  // F(mu) at this iteration's allocation, bits
  double delay_s = 0.0;  // best (incumbent) total delay so far
};

struct DelaySolution {
  double total_delay_s = std::numeric_limits<double>::infinity();
  double t_a_s = std::numeric_limits<double>::infinity();
  PowerAllocation allocation;
  RateReport rates;
  Scheme scheme = Scheme::Hybrid;
  bool converged = false;
  bool qos_attainable = true;
  std::size_t iterations = 0;
  std::vector<DinkelbachState> trace;

  /// True for the infinite-delay sentinel.
  [[nodiscard]] bool infinite() const { return !std::isfinite(total_delay_s); }
};

/// Fills rates and the delay of `alloc` using the closed-form remaining delay.
inline DelaySolution evaluate_solution(const ScenarioConfig& config, const ChannelRealization& chan,
                                       PowerAllocation alloc, Scheme scheme) {
  DelaySolution sol;
  sol.rates = compute_rates(config, chan, alloc);
  sol.allocation = std::move(alloc);
  sol.scheme = scheme;
  sol.t_a_s = remaining_delay(config.total_bits(), config.t0_seconds, sol.rates.sum_rb_bps,
                              sol.rates.sum_ra_bps);
  sol.total_delay_s = config.t0_seconds + sol.t_a_s;
  return sol;
}

}  // namespace bacnoma
