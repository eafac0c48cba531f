#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "stnoma/region.hpp"
#include "stnoma/scenario.hpp"

namespace stnoma {

/// Shortest decimal text that reads back to the same double; '.' separator
/// regardless of locale.
std::string format_double(double v);

/// CSV with header scheme,param,R1,R2,trials,seed and LF line endings.
std::string region_csv(const std::vector<RateRegionPoint>& rows, std::uint64_t seed);

struct RegionRun {
  ErgodicRegion ergodic;
  std::vector<RateRegionPoint> rows;  // st_noma, oma, corners, hybrid; CSV order
  std::filesystem::path csv;
  std::filesystem::path svg;
};

/// Ergodic region experiment: mu sweep, OMA line, corners and hybrid
/// frontier; writes region.csv and region.svg into out_dir. `overlay` holds
/// optional externally supplied (R1, R2) points drawn as a dashed reference.
RegionRun run_region(const Scenario& scenario, const std::filesystem::path& out_dir,
                     int workers = 1,
                     const std::vector<std::pair<double, double>>& overlay = {});

struct ConvergenceTrace {
  Antennas antennas;
  std::vector<double> objective;  // weighted sum rate per CCP iteration
};

/// CCP convergence at mu = 0.5 for each configured antenna setup on one
/// seeded channel each; all ccp_max_iters iterations are run. Writes
/// convergence.csv (config,iteration,weighted_sum_rate) and convergence.svg.
std::vector<ConvergenceTrace> run_convergence(const Scenario& scenario,
                                              const std::filesystem::path& out_dir);

struct SelfCheckOptions {
  int workers = 1;
  // Test hook: scale the first precoder column by 2 before verification.
  bool corrupt_decomposition = false;
  int underestimator_draws = 4;  // random (p, q) pairs per channel
};

struct SelfCheckReport {
  int channels = 0;
  double worst_decomposition = 0.0;
  double worst_underestimator_excess = 0.0;  // max of minorant - rate, full gradient
  double worst_tightness = 0.0;              // |minorant - rate| at p2 = q
  double worst_power_excess = 0.0;           // max of sum p - P_T
  double worst_trace_drop = 0.0;             // largest decrease along a CCP trace
  double worst_trace_identity = 0.0;         // |tr(X diag(p) X^H) - sum p|
  int own_coordinate_violations = 0;         // informational
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

/// Invariant battery over `scenario.trials` random channels: decomposition
/// residuals, minorant property and tightness, CCP feasibility and ascent.
SelfCheckReport self_check(const Scenario& scenario, const SelfCheckOptions& options = {});

/// Reads "R1,R2" rows (an optional header line is skipped).
std::vector<std::pair<double, double>> read_overlay_csv(const std::filesystem::path& path);

}  // namespace stnoma
