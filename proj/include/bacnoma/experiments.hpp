#pragma once

#include <bacnoma/baseline.hpp>
#include <bacnoma/channel.hpp>
#include <bacnoma/config.hpp>
#include <bacnoma/hybrid.hpp>
#include <bacnoma/solution.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

namespace bacnoma {

/// Per-realization result of one Monte Carlo draw.
struct RealizationOutcome {
  double hybrid_delay_s = 0.0;
  double baseline_delay_s = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  Scheme scheme = Scheme::Hybrid;

  [[nodiscard]] bool finite() const {
    return std::isfinite(hybrid_delay_s) && std::isfinite(baseline_delay_s);
  }
};

/// One row of a sweep. Means are taken over the realizations that have a
/// finite delay at every point of the sweep (see sweep()); `n` counts them.
struct SweepResult {
  double sweep_value = 0.0;
  double mean_hybrid_s = 0.0;
  double ci_hybrid_s = std::numeric_limits<double>::quiet_NaN();
  double mean_baseline_s = 0.0;
  double ci_baseline_s = std::numeric_limits<double>::quiet_NaN();
  double converged_frac = 0.0;
  std::size_t n = 0;
};

/// Worker count: `requested` (0 = hardware concurrency), capped by the
/// BACNOMA_THREADS environment variable when it holds a positive integer.
inline unsigned resolve_workers(unsigned requested = 0) {
  unsigned workers = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BACNOMA_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) workers = std::min(workers, static_cast<unsigned>(cap));
  }
  return workers;
}

/// Runs `task(i)` for i in [0, count) on up to `workers` threads. Each index
/// writes only its own slot, so the result does not depend on scheduling.
template <class Task>
void parallel_for(std::size_t count, unsigned workers, Task&& task) {
  workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) task(i);
    });
  }
}

inline RealizationOutcome solve_realization(const ScenarioConfig& config, std::uint64_t seed) {
  const auto chan = sample_channels(config, seed);
  const auto hybrid = minimize_delay(config, chan);
  const auto baseline = pure_noma_delay(config, chan);
  return {hybrid.total_delay_s, baseline.total_delay_s, hybrid.converged, hybrid.iterations,
          hybrid.scheme};
}

/// Realization i uses seed derive_seed(master_seed, i).
inline std::vector<RealizationOutcome> simulate(const ScenarioConfig& config, std::size_t n,
                                                std::uint64_t master_seed, unsigned workers = 0) {
  validate(config);
  std::vector<RealizationOutcome> out(n);
  parallel_for(n, resolve_workers(workers),
               [&](std::size_t i) { out[i] = solve_realization(config, derive_seed(master_seed, i)); });
  return out;
}

/// Mean and 95% normal-approximation half-width over the masked entries, in
/// index order. The half-width is NaN below 30 samples.
inline std::pair<double, double> mean_and_ci(const std::vector<double>& values,
                                             const std::vector<bool>& mask) {
  std::size_t count = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i]) {
      sum += values[i];
      ++count;
    }
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (count == 0) return {nan, nan};
  const double mean = sum / static_cast<double>(count);
  if (count < 30) return {mean, nan};
  double ss = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i]) ss += (values[i] - mean) * (values[i] - mean);
  }
  const double sd = std::sqrt(ss / static_cast<double>(count - 1));
  return {mean, 1.96 * sd / std::sqrt(static_cast<double>(count))};
}

inline SweepResult aggregate(const std::vector<RealizationOutcome>& outcomes,
                             const std::vector<bool>& mask, double sweep_value) {
  std::vector<double> hybrid, baseline;
  std::size_t used = 0, converged = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    hybrid.push_back(outcomes[i].hybrid_delay_s);
    baseline.push_back(outcomes[i].baseline_delay_s);
    if (mask[i]) {
      ++used;
      converged += outcomes[i].converged ? 1 : 0;
    }
  }
  SweepResult r;
  r.sweep_value = sweep_value;
  std::tie(r.mean_hybrid_s, r.ci_hybrid_s) = mean_and_ci(hybrid, mask);
  std::tie(r.mean_baseline_s, r.ci_baseline_s) = mean_and_ci(baseline, mask);
  r.converged_frac = used > 0 ? static_cast<double>(converged) / static_cast<double>(used) : 0.0;
  r.n = used;
  return r;
}

/// Realizations with a finite hybrid and baseline delay at every grid point.
inline std::vector<bool> common_finite_mask(const std::vector<std::vector<RealizationOutcome>>& grid) {
  if (grid.empty()) return {};
  std::vector<bool> mask(grid.front().size(), true);
  for (const auto& row : grid) {
    for (std::size_t i = 0; i < row.size(); ++i) mask[i] = mask[i] && row[i].finite();
  }
  return mask;
}

/// Aggregate over n draws. Draws whose delay is infinite (the energy budget
/// cannot carry the data in any finite time) are left out of the means.
inline SweepResult run_monte_carlo(const ScenarioConfig& config, std::size_t n,
                                   std::uint64_t master_seed, unsigned workers = 0) {
  const auto outcomes = simulate(config, n, master_seed, workers);
  const double value = config.data_bits_per_bd.empty() ? 0.0 : config.data_bits_per_bd.front();
  return aggregate(outcomes, common_finite_mask({outcomes}), value);
}

using ConfigEdit = std::function<void(ScenarioConfig&, double)>;

/// Raw outcomes of a paired sweep: the same realization seeds at every value.
inline std::vector<std::vector<RealizationOutcome>> sweep_outcomes(
    const ScenarioConfig& config, const std::vector<double>& values, const ConfigEdit& edit,
    std::size_t n, std::uint64_t master_seed, unsigned workers = 0) {
  std::vector<std::vector<RealizationOutcome>> grid;
  for (double v : values) {
    ScenarioConfig c = config;
    edit(c, v);
    grid.push_back(simulate(c, n, master_seed, workers));
  }
  return grid;
}

/// Paired sweep of one parameter. Every row averages over the same set of
/// realizations: those finite at every grid value.
inline std::vector<SweepResult> sweep(const ScenarioConfig& config, const std::vector<double>& values,
                                      const ConfigEdit& edit, std::size_t n,
                                      std::uint64_t master_seed, unsigned workers = 0) {
  const auto grid = sweep_outcomes(config, values, edit, n, master_seed, workers);
  const auto mask = common_finite_mask(grid);
  std::vector<SweepResult> rows;
  for (std::size_t j = 0; j < values.size(); ++j) rows.push_back(aggregate(grid[j], mask, values[j]));
  return rows;
}

inline void set_data_bits(ScenarioConfig& c, double bits) { c.set_uniform_data_bits(bits); }

inline std::vector<SweepResult> sweep_data_length(const ScenarioConfig& config,
                                                  const std::vector<double>& bits_grid,
                                                  std::size_t n, std::uint64_t master_seed,
                                                  unsigned workers = 0) {
  return sweep(config, bits_grid, set_data_bits, n, master_seed, workers);
}

/// Iterate trace of the optimizer on one draw. Empty when backscatter alone
/// finishes within t_0 (no iterations are run).
inline std::vector<DinkelbachState> convergence_trace(const ScenarioConfig& config,
                                                      std::uint64_t seed) {
  return minimize_delay(config, sample_channels(config, seed)).trace;
}

/// Formats with 9 significant digits.
inline std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepResult>& rows) {
  out << "sweep_value,mean_hybrid_s,ci_hybrid_s,mean_baseline_s,ci_baseline_s,converged_frac,n\n";
  for (const auto& r : rows) {
    out << format_g9(r.sweep_value) << ',' << format_g9(r.mean_hybrid_s) << ','
        << format_g9(r.ci_hybrid_s) << ',' << format_g9(r.mean_baseline_s) << ','
        << format_g9(r.ci_baseline_s) << ',' << format_g9(r.converged_frac) << ',' << r.n << '\n';
  }
}

inline void write_trace_csv(std::ostream& out, const std::vector<DinkelbachState>& trace) {
  out << "iteration,mu_s,f_bits,delay_s,y\n";
  for (const auto& s : trace) {
    out << s.iteration << ',' << format_g9(s.mu) << ',' << format_g9(s.f_value) << ','
        << format_g9(s.delay_s) << ',' << format_g9(s.y) << '\n';
  }
}

}  // namespace bacnoma
