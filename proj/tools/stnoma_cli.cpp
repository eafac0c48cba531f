// Batch front-end: ergodic rate region, CCP convergence traces, and the
// invariant self-check.
//
// Exit status: 0 success, 1 invariant failure, 2 invalid scenario or usage.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stnoma/experiments.hpp"

namespace {

constexpr int kInvariantFailure = 1;
constexpr int kInvalidScenario = 2;

struct CommonFlags {
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> mu_steps;
  int workers = 1;
};

void add_common(CLI::App& cmd, CommonFlags& f) {
  cmd.add_option("--scenario", f.scenario_path, "Scenario file (key = value lines)");
  cmd.add_option("--out", f.out_dir, "Output directory");
  cmd.add_option("--seed", f.seed, "RNG seed");
  cmd.add_option("--trials", f.trials, "Number of channel realizations");
  cmd.add_option("--mu-steps", f.mu_steps, "Points in the mu grid");
  cmd.add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
}

stnoma::Scenario resolve(const CommonFlags& f) {
  stnoma::Scenario s;
  if (!f.scenario_path.empty()) s = stnoma::load_scenario(f.scenario_path);
  stnoma::apply_env_overrides(s, [](const char* name) { return std::getenv(name); });
  if (f.seed) s.seed = *f.seed;
  if (f.trials) stnoma::set_scenario_key(s, "trials", std::to_string(*f.trials));
  if (f.mu_steps) stnoma::set_scenario_key(s, "mu_steps", std::to_string(*f.mu_steps));
  s.system_config();  // validates
  for (const auto& a : s.convergence_configs) stnoma::derive_dims(a);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous-triangularization MIMO-NOMA precoding experiments"};
  app.require_subcommand(1);

  CommonFlags region_flags, conv_flags, check_flags;
  std::string overlay_path;
  bool inject_fault = false;

  auto* region = app.add_subcommand("region", "Ergodic rate region (region.csv, region.svg)");
  add_common(*region, region_flags);
  region->add_option("--overlay", overlay_path,
                     "CSV of externally computed R1,R2 points drawn as a reference curve");

  auto* conv = app.add_subcommand("convergence", "CCP convergence traces (convergence.csv)");
  add_common(*conv, conv_flags);

  auto* check = app.add_subcommand("check", "Run the invariant battery on random channels");
  add_common(*check, check_flags);
  check->add_flag("--inject-fault", inject_fault, "Corrupt every decomposition (test hook)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalidScenario;
  }

  try {
    if (region->parsed()) {
      const auto s = resolve(region_flags);
      std::vector<std::pair<double, double>> overlay;
      if (!overlay_path.empty()) overlay = stnoma::read_overlay_csv(overlay_path);
      const auto run = stnoma::run_region(s, region_flags.out_dir, region_flags.workers, overlay);
      std::cout << "wrote " << run.csv.string() << " and " << run.svg.string() << " ("
                << run.rows.size() << " points, " << s.trials << " channels)\n";
      if (run.ergodic.worst_power_excess > 1e-9) {
        std::cerr << "power budget exceeded by " << run.ergodic.worst_power_excess << "\n";
        return kInvariantFailure;
      }
      return 0;
    }
    if (conv->parsed()) {
      const auto s = resolve(conv_flags);
      const auto traces = stnoma::run_convergence(s, conv_flags.out_dir);
      int failed = 0;
      for (const auto& tr : traces) {
        std::cout << stnoma::antenna_label(tr.antennas) << ":";
        for (double v : tr.objective) std::cout << ' ' << stnoma::format_double(v);
        std::cout << '\n';
        for (std::size_t i = 1; i < tr.objective.size(); ++i)
          if (tr.objective[i] < tr.objective[i - 1] - 1e-9) ++failed;
      }
      return failed ? kInvariantFailure : 0;
    }
    if (check->parsed()) {
      const auto s = resolve(check_flags);
      stnoma::SelfCheckOptions opt;
      opt.workers = check_flags.workers;
      opt.corrupt_decomposition = inject_fault;
      const auto rep = stnoma::self_check(s, opt);
      std::cout << "channels                     " << rep.channels << '\n'
                << "worst decomposition residual " << rep.worst_decomposition << '\n'
                << "worst minorant excess        " << rep.worst_underestimator_excess << '\n'
                << "worst anchor tightness gap   " << rep.worst_tightness << '\n'
                << "worst power excess           " << rep.worst_power_excess << '\n'
                << "worst trace power mismatch   " << rep.worst_trace_identity << '\n'
                << "worst CCP objective drop     " << rep.worst_trace_drop << '\n'
                << "own-coordinate minorant violations (informational) "
                << rep.own_coordinate_violations << '\n';
      for (const auto& f : rep.failures) std::cout << "FAIL " << f << '\n';
      std::cout << (rep.ok() ? "all invariants hold\n" : "invariant failures found\n");
      return rep.ok() ? 0 : kInvariantFailure;
    }
  } catch (const stnoma::ConfigError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kInvalidScenario;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvariantFailure;
  }
  return 0;
}
