#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>

#include "stnoma/scenario.hpp"

using namespace stnoma;

TEST_CASE("defaults describe the reference setup") {
  const Scenario s;
  const auto cfg = s.system_config();
  CHECK(cfg.antennas.n_bs == 5);
  CHECK(cfg.antennas.m1 == 3);
  CHECK(cfg.antennas.m2 == 3);
  CHECK(cfg.pathloss1 == 62500.0);
  CHECK(cfg.pathloss2 == 2500.0);
  CHECK(cfg.power_budget == doctest::Approx(1.0));
  CHECK(cfg.noise_power == doctest::Approx(3.1622776601683795e-7));
  CHECK(s.trials == 100);
  CHECK(s.mu_steps == 21);
  REQUIRE(s.convergence_configs.size() == 3);
  CHECK(antenna_label(s.convergence_configs[0]) == "2x2x3");
  CHECK(antenna_label(s.convergence_configs[2]) == "4x4x6");
}

TEST_CASE("parsing key-value text") {
  const auto s = parse_scenario(
      "# comment line\n"
      "n_bs = 6\n"
      "m1=4   # trailing comment\n"
      "  m2 =4\n"
      "\n"
      "d1 = 300.5\n"
      "pt_dbm = 20\n"
      "seed = 18446744073709551615\n"
      "linearization = own\n"
      "convergence_configs = 2x2x2, 3x3x5 4x2x5\n");
  CHECK(s.antennas.n_bs == 6);
  CHECK(s.antennas.m1 == 4);
  CHECK(s.antennas.m2 == 4);
  CHECK(s.d1 == 300.5);
  CHECK(s.pt_dbm == 20.0);
  CHECK(s.seed == 18446744073709551615ull);
  CHECK(s.solver.linearization == Linearization::kOwnCoordinate);
  REQUIRE(s.convergence_configs.size() == 3);
  CHECK(s.convergence_configs[2].m1 == 4);
  CHECK(s.convergence_configs[2].m2 == 2);
  CHECK(s.convergence_configs[2].n_bs == 5);
  CHECK(s.d2 == 50.0);  // untouched keys keep their defaults
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_scenario("unknown = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("n_bs = 5\nn_bs = 6\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("n_bs = five\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("n_bs = 5x\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("n_bs 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("trials = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("linearization = sideways\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("convergence_configs = 2x2\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("d1 = nan\n"), ConfigError);
}

TEST_CASE("semantic validation") {
  auto s = parse_scenario("n_bs = 7\nm1 = 3\nm2 = 3\n");
  CHECK_THROWS_AS(s.system_config(), ConfigError);
  s = parse_scenario("d1 = 40\n");
  CHECK_THROWS_AS(s.system_config(), ConfigError);
}

TEST_CASE("environment overrides") {
  std::map<std::string, std::string> env{{"STNOMA_TRIALS", "7"}, {"STNOMA_SEED", "99"},
                                         {"STNOMA_SIGMA2_DBM", "-40"}};
  Scenario s;
  apply_env_overrides(s, [&](const char* name) -> const char* {
    auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  CHECK(s.trials == 7);
  CHECK(s.seed == 99);
  CHECK(s.sigma2_dbm == -40.0);
  env = {{"STNOMA_TRIALS", "-3"}};
  CHECK_THROWS_AS(apply_env_overrides(s, [&](const char* name) -> const char* {
                    auto it = env.find(name);
                    return it == env.end() ? nullptr : it->second.c_str();
                  }),
                  ConfigError);
}

TEST_CASE("every key is settable") {
  for (const auto& k : scenario_keys()) CHECK(!k.empty());
  Scenario s;
  set_scenario_key(s, "inner_tol", "1e-9");
  CHECK(s.solver.inner_tol == 1e-9);
  set_scenario_key(s, "ccp_max_iters", "12");
  CHECK(s.solver.ccp_max_iters == 12);
  set_scenario_key(s, "tau_steps", "3");
  CHECK(s.tau_steps == 3);
}
