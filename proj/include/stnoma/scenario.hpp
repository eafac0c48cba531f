#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "stnoma/power.hpp"
#include "stnoma/system.hpp"

namespace stnoma {

/// Experiment description. Defaults reproduce the two-user downlink setup
/// with d1 = 250 m, d2 = 50 m, square-law path loss, 30 dBm transmit power,
/// -35 dBm noise and (M1, M2, N) = (3, 3, 5).
struct Scenario {
  Antennas antennas{5, 3, 3};
  double d1 = 250.0;
  double d2 = 50.0;
  double pathloss_exponent = 2.0;
  double pt_dbm = 30.0;
  double sigma2_dbm = -35.0;
  int trials = 100;
  int mu_steps = 21;
  int tau_steps = 21;
  std::uint64_t seed = 1;
  SolverSettings solver;
  // Antenna setups for the convergence experiment.
  std::vector<Antennas> convergence_configs{{3, 2, 2}, {5, 3, 3}, {6, 4, 4}};

  /// Throws ConfigError if the scenario does not describe a valid system.
  SystemConfig system_config() const;
};

/// Every key accepted in scenario files and as STNOMA_<KEY> variables.
const std::vector<std::string>& scenario_keys();

/// Assigns one key. Throws ConfigError on unknown keys or unparsable values.
void set_scenario_key(Scenario& s, std::string_view key, std::string_view value);

/// "key = value" lines; '#' starts a comment; blank lines are ignored.
/// Unknown or repeated keys are errors.
Scenario parse_scenario(std::string_view text, Scenario base = {});
Scenario load_scenario(const std::filesystem::path& path, Scenario base = {});

using EnvLookup = std::function<const char*(const char*)>;

/// Applies STNOMA_<UPPERCASE_KEY> overrides for every known key.
void apply_env_overrides(Scenario& s, const EnvLookup& lookup);

/// "M1xM2xN", the label used in convergence output.
std::string antenna_label(const Antennas& a);

}  // namespace stnoma
