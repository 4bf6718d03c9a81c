// Solves one channel draw at the default scenario and compares against pure NOMA.
#include <bacnoma/bacnoma.hpp>

#include <cstdio>

int main() {
  bacnoma::ScenarioConfig config;
  config.energy_budget_joules = 0.5;
  const auto chan = bacnoma::sample_channels(config, 7);

  const auto hybrid = bacnoma::minimize_delay(config, chan);
  const auto noma = bacnoma::pure_noma_delay(config, chan);

  std::printf("scheme      %s\n", std::string(bacnoma::to_string(hybrid.scheme)).c_str());
  std::printf("hybrid      %.6f s (%zu iterations)\n", hybrid.total_delay_s, hybrid.iterations);
  std::printf("pure NOMA   %.6f s\n", noma.total_delay_s);
  std::printf("P0          %.4f W\n", hybrid.allocation.p0_watts);
  for (std::size_t i = 0; i < chan.size(); ++i) {
    const std::size_t k = chan.permutation[i];
    std::printf("  BD %zu  eta %.4f  p_a %.4f W\n", i, hybrid.allocation.eta(k),
                hybrid.allocation.p_active_watts[k]);
  }
  return 0;
}
