#include <bacnoma/instance.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace bacnoma;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bacnoma_" + name)).string();
}

}  // namespace

TEST(Instance, RoundTripsThroughJson) {
  ScenarioConfig c;
  const auto chan = sample_channels(c, 3);
  const auto inst = make_instance(c, chan, 12.5, 0.75);
  const auto path = temp_path("roundtrip.json");
  write_instance(path, inst);
  const auto back = read_instance(path);
  EXPECT_EQ(back.h4, inst.h4);
  EXPECT_EQ(back.h2, inst.h2);
  EXPECT_EQ(back.w_qos, inst.w_qos);
  EXPECT_EQ(back.y, inst.y);
  EXPECT_EQ(back.mu, inst.mu);
  EXPECT_EQ(back.sigma2, inst.sigma2);
  EXPECT_EQ(back.gamma0_tilde, inst.gamma0_tilde);
  EXPECT_EQ(back.L_tilde, 4e6);

  std::ifstream in(path);
  const auto doc = nlohmann::json::parse(in);
  for (const char* key : {"y", "mu", "sigma2", "alpha", "h_si_sq", "p0_max", "pa_max", "e_max", "gamma0_tilde",
                          "h4", "h2", "w_qos", "h0_sq", "L_tilde", "t0", "B"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc.size(), 16u);
  std::filesystem::remove(path);
}

TEST(Instance, RebuiltProblemSolvesIdentically) {
  ScenarioConfig c;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto chan = sample_channels(c, s);
    if (!qos_attainable(c, chan)) continue;
    const auto start = max_reflect_sum(chan, c.p0_max_watts, compute_thresholds(c).gamma0_tilde);
    const double y = optimal_y(c, chan, c.p0_max_watts, start.p_reflect);
    const auto inst = make_instance(c, chan, y, 0.4);
    const auto sol = solve_instance(inst);
    const auto direct = solve_reflect_subproblem(c, chan, y);
    ASSERT_TRUE(sol.feasible);
    EXPECT_NEAR(sol.allocation.p0_watts, direct.p0_watts, 1e-9 * direct.p0_watts);
    PowerAllocation a{direct.p0_watts, direct.p_reflect_watts, optimal_active_powers(0.4, c)};
    const double expect = transformed_objective(c, chan, y, 0.4, a);
    EXPECT_NEAR(sol.objective_bits, expect, 1e-9 * std::abs(expect));
  }
}

TEST(Instance, ZeroChannelObjectiveIsTotalData) {
  const auto c = oracle::synthetic_config(2);
  auto chan = oracle::synthetic_channel(2, 1);
  chan.h_gain_sq = {0.0, 0.0};
  auto inst = make_instance(c, chan, 0.0, 1.0);
  inst.h2 = {0.0, 0.0};
  inst.h4 = {0.0, 0.0};
  inst.w_qos = {0.0, 0.0};
  const auto sol = solve_instance(inst);
  EXPECT_DOUBLE_EQ(sol.objective_bits, inst.L_tilde);
}

TEST(Instance, MalformedFilesAreRejected) {
  EXPECT_THROW(read_instance("/nonexistent/instance.json"), InvalidParameter);
  const auto path = temp_path("bad.json");
  {
    std::ofstream out(path);
    out << "{\"y\": 1}";
  }
  EXPECT_THROW(read_instance(path), InvalidParameter);
  std::filesystem::remove(path);
}
