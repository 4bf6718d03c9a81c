#include <bacnoma/audit.hpp>
#include <bacnoma/hybrid.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bacnoma;

TEST(QuadraticTransform, OptimalYExamples) {
  auto c = oracle::synthetic_config(1);
  auto chan = oracle::synthetic_channel(1, 2);
  EXPECT_EQ(optimal_y(c, chan, 1.0, {0.0}), 0.0);
  c.si_residual_alpha = 0.0;
  chan.noise_power_watts = 2.0;
  chan.h_gain_sq = {1.0};
  EXPECT_DOUBLE_EQ(optimal_y(c, chan, 1.0, {4.0}), 1.0);
}

TEST(QuadraticTransform, OptimalYRecoversSnr) {
  PortableRng rng(3);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const std::size_t k = 1 + s % 8;
    const auto c = oracle::synthetic_config(k);
    const auto chan = oracle::synthetic_channel(k, s);
    const double p0 = c.p0_max_watts * rng.uniform();
    std::vector<double> pr(k);
    for (auto& p : pr) p = p0 * rng.uniform();
    const double snr = oracle::signal_sum(chan, pr) / oracle::impairment(c, chan, p0);
    const double y = optimal_y(c, chan, p0, pr);
    const double t = transformed_snr(c, chan, y, p0, oracle::signal_sum(chan, pr));
    EXPECT_NEAR(t, snr, 1e-12 * (1.0 + snr));
    // y* maximizes the surrogate: any other y gives less.
    EXPECT_LE(transformed_snr(c, chan, 0.9 * y, p0, oracle::signal_sum(chan, pr)), t);
    EXPECT_LE(transformed_snr(c, chan, 1.1 * y, p0, oracle::signal_sum(chan, pr)), t);
  }
}

TEST(ActivePowers, Examples) {
  ScenarioConfig c;
  c.energy_budget_joules = 0.1;
  c.pa_max_watts = 0.5;
  for (double p : optimal_active_powers(0.5, c)) EXPECT_DOUBLE_EQ(p, 0.2);
  c.energy_budget_joules = std::numeric_limits<double>::infinity();
  for (double p : optimal_active_powers(0.5, c)) EXPECT_DOUBLE_EQ(p, 0.5);
  EXPECT_THROW(optimal_active_powers(0.0, c), InvalidParameter);
}

TEST(ActivePowers, BoxCornerBeatsGrid) {
  for (double mu : {0.05, 0.3, 1.0, 4.0}) {
    auto c = oracle::synthetic_config(2);
    c.energy_budget_joules = 0.1;
    const auto chan = oracle::synthetic_channel(2, 31);
    PowerAllocation a = PowerAllocation::zeros(2, c.p0_max_watts);
    a.p_active_watts = optimal_active_powers(mu, c);
    const double best = dinkelbach_objective(c, chan, mu, a);
    const double cap = std::min(c.pa_max_watts, c.energy_budget_joules / mu);
    double grid_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200; ++i) {
      for (int j = 0; j < 200; ++j) {
        PowerAllocation g = a;
        g.p_active_watts = {cap * i / 199.0, cap * j / 199.0};
        grid_best = std::min(grid_best, dinkelbach_objective(c, chan, mu, g));
      }
    }
    EXPECT_LE(best, grid_best + 1e-9 * std::abs(grid_best));
  }
}

TEST(ReflectSubproblem, ZeroYKeepsFullPower) {
  const auto c = oracle::synthetic_config(3);
  const auto chan = oracle::synthetic_channel(3, 6);
  const auto r = solve_reflect_subproblem(c, chan, 0.0);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.p0_watts, c.p0_max_watts);
  EXPECT_EQ(r.p_reflect_watts, max_reflect_sum(chan, c.p0_max_watts, oracle::gamma0_tilde(c)).p_reflect);
}

TEST(ReflectSubproblem, NoSelfInterferenceUsesFullPower) {
  auto c = oracle::synthetic_config(3);
  c.si_residual_alpha = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto chan = oracle::synthetic_channel(3, 60 + s);
    const auto r = solve_reflect_subproblem(c, chan, 1.0);
    ASSERT_TRUE(r.feasible);
    EXPECT_NEAR(r.p0_watts, c.p0_max_watts, 1e-9 * c.p0_max_watts);
  }
}

TEST(ReflectSubproblem, UnreachableTargetIsInfeasible) {
  const auto c = oracle::synthetic_config(2);
  auto chan = oracle::synthetic_channel(2, 7);
  chan.h0_gain_sq = 1e-12;
  EXPECT_FALSE(solve_reflect_subproblem(c, chan, 1.0).feasible);
}

TEST(ReflectSubproblem, MatchesGridOracle) {
  PortableRng rng(99);
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto c = oracle::synthetic_config(2);
    const auto chan = oracle::synthetic_channel(2, 700 + s);
    const auto start = max_reflect_sum(chan, c.p0_max_watts, oracle::gamma0_tilde(c));
    const double y = optimal_y(c, chan, c.p0_max_watts, start.p_reflect) * (0.3 + 1.4 * rng.uniform());
    const auto r = solve_reflect_subproblem(c, chan, y);
    ASSERT_TRUE(r.feasible);
    EXPECT_TRUE(oracle::downlink_ok(c, chan, r.p0_watts, r.p_reflect_watts));
    const double mine = c.t0_seconds * c.bandwidth_hz * std::log2(r.log_argument);
    const double grid = oracle::grid_reflect_objective(c, chan, y);
    EXPECT_NEAR(mine, grid, 1e-3 * std::abs(grid)) << "seed " << s;
    EXPECT_GE(mine, grid * (1.0 - 1e-9));
  }
}

TEST(Dinkelbach, ObjectiveAndRatio) {
  const auto c = oracle::synthetic_config(3);
  const auto chan = oracle::synthetic_channel(3, 15);
  const auto zero = PowerAllocation::zeros(3, 1.0);
  EXPECT_DOUBLE_EQ(dinkelbach_objective(c, chan, 2.0, zero), c.total_bits());

  PowerAllocation a = PowerAllocation::zeros(3, 4.0);
  a.p_reflect_watts = max_reflect_sum(chan, 4.0, oracle::gamma0_tilde(c)).p_reflect;
  a.p_active_watts.assign(3, 0.3);
  const auto rates = compute_rates(c, chan, a);
  EXPECT_DOUBLE_EQ(dinkelbach_objective(c, chan, 0.0, a), c.total_bits() - c.t0_seconds * rates.sum_rb_bps);
  double rb = 0.0, ra = 0.0;
  for (double r : backscatter_rates(c, chan, a)) rb += r;
  for (double r : active_rates(c, chan, a)) ra += r;
  EXPECT_NEAR(dinkelbach_objective(c, chan, 0.7, a), c.total_bits() - c.t0_seconds * rb - 0.7 * ra,
              1e-9 * c.total_bits());
  const double mu = update_mu(c, chan, a);
  if (mu > 0.0) {
    EXPECT_DOUBLE_EQ(mu, remaining_delay(c.total_bits(), c.t0_seconds, rates.sum_rb_bps, rates.sum_ra_bps));
  }
  EXPECT_NEAR(dinkelbach_objective(c, chan, mu, a), 0.0, 1e-6 * c.total_bits());
}

TEST(MinimizeDelay, ZeroDataIsPureBackscatter) {
  const auto c = oracle::synthetic_config(3, 0.0);
  const auto chan = oracle::synthetic_channel(3, 16);
  const auto sol = minimize_delay(c, chan);
  EXPECT_EQ(sol.scheme, Scheme::PureBac);
  EXPECT_EQ(sol.total_delay_s, c.t0_seconds);
  EXPECT_EQ(sol.t_a_s, 0.0);
}

TEST(MinimizeDelay, BlockedBackscatterFallsBackToActiveOnly) {
  auto c = oracle::synthetic_config(3);
  auto chan = oracle::synthetic_channel(3, 17);
  for (auto& g : chan.g_gain_sq) g = 1e15;
  const auto sol = minimize_delay(c, chan);
  const auto active = solve_active_phase(c, chan, c.total_bits());
  ASSERT_TRUE(active.finite());
  EXPECT_EQ(sol.scheme, Scheme::Hybrid);
  EXPECT_NEAR(sol.total_delay_s, c.t0_seconds + active.t_a_s, 1e-6 * active.t_a_s);
}

TEST(MinimizeDelay, MatchesGridOracleForTwoDevices) {
  for (std::uint64_t s = 0; s < 6; ++s) {
    auto c = oracle::synthetic_config(2, 2e6);
    c.energy_budget_joules = 0.5;
    const auto chan = oracle::synthetic_channel(2, 1200 + s);
    const auto sol = minimize_delay(c, chan);
    ASSERT_FALSE(sol.infinite());
    const double grid = oracle::grid_hybrid_delay(c, chan);
    EXPECT_NEAR(sol.total_delay_s, grid, 1e-3 * grid) << "seed " << s;
  }
}

TEST(MinimizeDelay, DefaultScenarioMatchesGridOracle) {
  ScenarioConfig c;
  c.num_bds = 2;
  c.set_uniform_data_bits(1e6);
  int compared = 0;
  for (std::uint64_t s = 0; compared < 6 && s < 60; ++s) {
    const auto chan = sample_channels(c, s);
    const auto sol = minimize_delay(c, chan);
    if (sol.infinite() || sol.scheme == Scheme::PureBac) continue;
    ++compared;
    const double grid = oracle::grid_hybrid_delay(c, chan);
    EXPECT_NEAR(sol.total_delay_s, grid, 1e-3 * grid) << "seed " << s;
  }
  EXPECT_EQ(compared, 6);
}

TEST(MinimizeDelay, TraceInvariants) {
  ScenarioConfig c;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto chan = sample_channels(c, s);
    const auto sol = run_hybrid(c, chan);
    EXPECT_LE(sol.trace.size(), c.max_iterations);
    for (std::size_t i = 1; i < sol.trace.size(); ++i) {
      EXPECT_LE(sol.trace[i].delay_s, sol.trace[i - 1].delay_s);
      EXPECT_EQ(sol.trace[i].iteration, i + 1);
    }
    if (!sol.trace.empty()) {
      EXPECT_EQ(sol.trace.back().delay_s, sol.total_delay_s);
    }
    if (sol.converged && !sol.trace.empty()) {
      const auto& last = sol.trace.back();
      EXPECT_TRUE(std::abs(last.f_value) <= c.epsilon_tolerance || !(last.mu > 0.0));
    }
    EXPECT_TRUE(audit_solution(c, chan, sol).passed()) << audit_solution(c, chan, sol).failure;
  }
}

TEST(MinimizeDelay, UnlimitedEnergyConvergesAtFixedPoint) {
  ScenarioConfig c;
  c.energy_budget_joules = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto chan = sample_channels(c, s);
    const auto sol = minimize_delay(c, chan);
    EXPECT_TRUE(sol.converged);
    if (sol.scheme != Scheme::Hybrid || sol.trace.empty()) continue;
    const double mu = sol.trace.back().mu;
    EXPECT_NEAR(mu, sol.t_a_s, 1e-6 * sol.t_a_s);
  }
}

TEST(MinimizeDelay, PureBranchIsNeverBeatenByHybrid) {
  ScenarioConfig c;
  c.set_uniform_data_bits(1e4);
  int pure = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto chan = sample_channels(c, s);
    const auto sol = minimize_delay(c, chan);
    if (sol.scheme != Scheme::PureBac) continue;
    ++pure;
    EXPECT_GE(run_hybrid(c, chan).total_delay_s, c.t0_seconds);
    EXPECT_TRUE(audit_solution(c, chan, sol).passed()) << audit_solution(c, chan, sol).failure;
  }
  EXPECT_GT(pure, 0);
}

TEST(Baseline, ActivePhaseIsSelfConsistent) {
  ScenarioConfig c;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto chan = sample_channels(c, s);
    const auto base = pure_noma_delay(c, chan);
    EXPECT_EQ(base.scheme, Scheme::Baseline);
    for (double p : base.allocation.p_reflect_watts) EXPECT_EQ(p, 0.0);
    if (base.infinite()) {
      EXPECT_GE(c.total_bits(), active_phase_bit_limit(c, chan));
      continue;
    }
    const double pa = base.allocation.p_active_watts[0];
    EXPECT_NEAR(base.t_a_s * base.rates.sum_ra_bps, c.total_bits(), 1e-9 * c.total_bits());
    EXPECT_LE(base.t_a_s * pa, c.energy_budget_joules * (1.0 + 1e-12));
    EXPECT_LE(pa, c.pa_max_watts);
    if (pa < c.pa_max_watts) {
      EXPECT_NEAR(base.t_a_s * pa, c.energy_budget_joules, 1e-8 * c.energy_budget_joules);
    }
  }
}

TEST(Baseline, EnergyLimitIsSharp) {
  ScenarioConfig c;
  const auto chan = sample_channels(c, 3);
  const double limit = active_phase_bit_limit(c, chan);
  EXPECT_TRUE(solve_active_phase(c, chan, 0.999 * limit).finite());
  EXPECT_FALSE(solve_active_phase(c, chan, limit).finite());
  EXPECT_EQ(solve_active_phase(c, chan, 0.0).t_a_s, 0.0);
}

TEST(Audit, CatchesViolations) {
  ScenarioConfig c;
  c.energy_budget_joules = 1.0;
  const auto chan = sample_channels(c, 5);
  auto sol = minimize_delay(c, chan);
  ASSERT_FALSE(sol.infinite());
  ASSERT_TRUE(audit_solution(c, chan, sol).passed());

  auto bad = sol;
  bad.allocation.p_active_watts[0] = 2.0 * c.pa_max_watts;
  EXPECT_FALSE(audit_solution(c, chan, bad).active_box_ok);

  bad = sol;
  bad.t_a_s *= 0.5;
  bad.total_delay_s = c.t0_seconds + bad.t_a_s;
  EXPECT_FALSE(audit_solution(c, chan, bad).passed());

  bad = sol;
  bad.total_delay_s = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(audit_solution(c, chan, bad).passed());
}

TEST(Audit, BaselineInfeasibilityIgnoresBackscatter) {
  // Data just above the active-phase limit, by less than the backscatter
  // share: hybrid is finite, pure NOMA is not.
  ScenarioConfig c;
  const auto chan = sample_channels(c, 1);
  const auto w = max_reflect_sum(chan, c.p0_max_watts, compute_thresholds(c).gamma0_tilde);
  const double backscatter_bits = c.t0_seconds * sum_backscatter_rate(c, chan, c.p0_max_watts, w.p_reflect);
  ASSERT_GT(backscatter_bits, 0.0);
  c.set_uniform_data_bits((active_phase_bit_limit(c, chan) + 0.5 * backscatter_bits) / c.num_bds);
  const auto hybrid = minimize_delay(c, chan);
  const auto base = pure_noma_delay(c, chan);
  EXPECT_FALSE(hybrid.infinite());
  EXPECT_TRUE(base.infinite());
  EXPECT_TRUE(audit_solution(c, chan, hybrid).passed()) << audit_solution(c, chan, hybrid).failure;
  EXPECT_TRUE(audit_solution(c, chan, base).passed()) << audit_solution(c, chan, base).failure;
}
