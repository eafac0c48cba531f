#include "stnoma/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "stnoma/parallel.hpp"
#include "stnoma/svg.hpp"

namespace stnoma {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<std::pair<double, double>> xy(const std::vector<RateRegionPoint>& pts) {
  std::vector<std::pair<double, double>> out;
  for (const auto& p : pts) out.emplace_back(p.r1, p.r2);
  return out;
}

// Random allocation on the support pattern with total power u * budget.
PowerAllocation random_allocation(Rng& rng, const StreamDims& dims, double budget) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto p = PowerAllocation::zeros(dims);
  double sum = 0.0;
  for (int l = 0; l < dims.total; ++l) {
    if (dims.owner(l) != StreamOwner::kPrivate2) sum += p.p1[l] = unit(rng);
    if (dims.owner(l) != StreamOwner::kPrivate1) sum += p.p2[l] = unit(rng);
  }
  const double scale = unit(rng) * budget / sum;
  for (int l = 0; l < dims.total; ++l) {
    p.p1[l] *= scale;
    p.p2[l] *= scale;
  }
  return p;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string region_csv(const std::vector<RateRegionPoint>& rows, std::uint64_t seed) {
  std::string out = "scheme,param,R1,R2,trials,seed\n";
  for (const auto& r : rows) {
    out += scheme_name(r.scheme);
    out += ',' + format_double(r.param) + ',' + format_double(r.r1) + ',' + format_double(r.r2) +
           ',' + std::to_string(r.trials) + ',' + std::to_string(seed) + '\n';
  }
  return out;
}

RegionRun run_region(const Scenario& scenario, const std::filesystem::path& out_dir, int workers,
                     const std::vector<std::pair<double, double>>& overlay) {
  const auto cfg = scenario.system_config();
  const auto mu_grid = uniform_grid(scenario.mu_steps);
  const auto tau_grid = uniform_grid(scenario.tau_steps);

  RegionRun run;
  run.ergodic = st_noma_region(cfg, mu_grid, scenario.trials, scenario.seed, scenario.solver,
                               workers);
  const auto& eg = run.ergodic;
  const auto oma = oma_line(eg.capacity1, eg.capacity2, tau_grid, eg.trials);
  const RateRegionPoint corner1{eg.capacity1, 0.0, Scheme::kP2pUser1, 1.0, eg.trials};
  const RateRegionPoint corner2{0.0, eg.capacity2, Scheme::kP2pUser2, 0.0, eg.trials};
  const auto hybrid = hybrid_region(eg.st_points, corner1, corner2);

  run.rows = eg.st_points;
  run.rows.insert(run.rows.end(), oma.begin(), oma.end());
  run.rows.push_back(corner1);
  run.rows.push_back(corner2);
  run.rows.insert(run.rows.end(), hybrid.begin(), hybrid.end());

  std::filesystem::create_directories(out_dir);
  run.csv = out_dir / "region.csv";
  run.svg = out_dir / "region.svg";
  write_file(run.csv, region_csv(run.rows, scenario.seed));

  std::vector<PlotSeries> series;
  series.push_back({"ST-NOMA", "#1f77b4", xy(eg.st_points), true, false});
  series.push_back({"OMA", "#d62728", xy(oma), false, false});
  series.push_back({"Hybrid", "#2ca02c", xy(hybrid), false, true});
  if (!overlay.empty()) series.push_back({"Reference", "#9467bd", overlay, false, true});
  const std::string title = "Ergodic rate region, " + antenna_label(scenario.antennas) + ", " +
                            std::to_string(scenario.trials) + " channels";
  write_file(run.svg, render_svg(series, title, "R1 [bits/channel use]", "R2 [bits/channel use]"));
  return run;
}

std::vector<ConvergenceTrace> run_convergence(const Scenario& scenario,
                                              const std::filesystem::path& out_dir) {
  auto settings = scenario.solver;
  settings.ccp_tol = 0.0;  // run every iteration
  constexpr double kMu = 0.5;

  std::vector<ConvergenceTrace> traces;
  std::string csv = "config,iteration,weighted_sum_rate\n";
  std::vector<PlotSeries> series;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  for (std::size_t i = 0; i < scenario.convergence_configs.size(); ++i) {
    Scenario s = scenario;
    s.antennas = scenario.convergence_configs[i];
    const auto cfg = s.system_config();
    auto rng = trial_rng(scenario.seed, i);
    const auto ch = sample_channels(rng, cfg.antennas);
    const auto d = simultaneous_triangularize(ch, derive_dims(cfg.antennas));
    const auto res = ccp_allocate(d, cfg, kMu, settings);

    ConvergenceTrace tr{cfg.antennas, res.state.objective_trace};
    const auto label = antenna_label(tr.antennas);
    PlotSeries ps{label, colors[i % 6], {}, true, false};
    for (std::size_t it = 0; it < tr.objective.size(); ++it) {
      csv += label + ',' + std::to_string(it + 1) + ',' + format_double(tr.objective[it]) + '\n';
      ps.points.emplace_back(static_cast<double>(it + 1), tr.objective[it]);
    }
    series.push_back(std::move(ps));
    traces.push_back(std::move(tr));
  }
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "convergence.csv", csv);
  write_file(out_dir / "convergence.svg",
             render_svg(series, "CCP convergence, mu = 0.5", "Iteration",
                        "Weighted sum rate [bits/channel use]"));
  return traces;
}

SelfCheckReport self_check(const Scenario& scenario, const SelfCheckOptions& options) {
  constexpr double kDecompositionTol = 1e-9;
  constexpr double kMinorantTol = 1e-9;
  constexpr double kTightnessTol = 1e-12;
  constexpr double kPowerTol = 1e-9;
  constexpr double kAscentTol = 1e-9;
  constexpr double kMu = 0.5;

  const auto cfg = scenario.system_config();
  const auto dims = derive_dims(cfg.antennas);

  struct TrialCheck {
    double decomposition = 0.0;
    double excess = -1e300;
    double tightness = 0.0;
    double power_excess = -1e300;
    double trace_drop = 0.0;
    double trace_identity = 0.0;
    int own_violations = 0;
    std::string error;
  };
  std::vector<TrialCheck> checks(scenario.trials);

  parallel_for(checks.size(), options.workers, [&](std::size_t t) {
    TrialCheck& c = checks[t];
    auto rng = trial_rng(scenario.seed, t);
    const auto ch = sample_channels(rng, cfg.antennas);
    StDecomposition d;
    try {
      d = simultaneous_triangularize(ch, dims);
    } catch (const std::exception& e) {
      c.error = e.what();
      return;
    }
    if (options.corrupt_decomposition) d.x.col(0) *= 2.0;
    c.decomposition = verify_decomposition(d, ch).worst();

    auto draw_rng = trial_rng(scenario.seed ^ 0x9e3779b97f4a7c15ULL, t);
    for (int k = 0; k < options.underestimator_draws; ++k) {
      const auto p = random_allocation(draw_rng, dims, cfg.power_budget);
      const auto anchor_alloc = random_allocation(draw_rng, dims, cfg.power_budget);
      std::vector<double> q(anchor_alloc.p2.begin(), anchor_alloc.p2.begin() + dims.shared);
      const auto r1 = rate_user1(p, d, cfg);
      auto at_anchor = p;
      for (int l = 0; l < dims.shared; ++l) at_anchor.p2[l] = q[l];
      const auto r1_anchor = rate_user1(at_anchor, d, cfg);
      for (int l = 0; l < dims.shared; ++l) {
        c.excess = std::max(c.excess, underestimator(p, q, d, cfg, l) - r1[l]);
        c.tightness = std::max(
            c.tightness, std::abs(underestimator(at_anchor, q, d, cfg, l) - r1_anchor[l]));
        if (underestimator(p, q, d, cfg, l, Linearization::kOwnCoordinate) > r1[l] + kMinorantTol)
          ++c.own_violations;
      }
      // tr(X diag(p1 + p2) X^H) equals sum p for unit-norm columns.
      Eigen::VectorXd weights(dims.total);
      for (int l = 0; l < dims.total; ++l) weights[l] = p.p1[l] + p.p2[l];
      const double trace_form =
          (d.x * weights.cast<cdouble>().asDiagonal() * d.x.adjoint()).trace().real();
      c.trace_identity = std::max(c.trace_identity, std::abs(trace_form - p.total()));
    }

    const auto res = ccp_allocate(d, cfg, kMu, scenario.solver);
    c.power_excess = std::max(c.power_excess, res.power.total() - cfg.power_budget);
    try {
      validate(res.power, dims, cfg.power_budget, kPowerTol);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    const auto& tr = res.state.objective_trace;
    for (std::size_t i = 1; i < tr.size(); ++i) c.trace_drop = std::max(c.trace_drop, tr[i - 1] - tr[i]);
  });

  SelfCheckReport rep;
  rep.channels = scenario.trials;
  rep.worst_underestimator_excess = -1e300;
  rep.worst_power_excess = -1e300;
  for (std::size_t t = 0; t < checks.size(); ++t) {
    const auto& c = checks[t];
    const std::string where = "channel " + std::to_string(t) + ": ";
    if (!c.error.empty()) rep.failures.push_back(where + c.error);
    rep.worst_decomposition = std::max(rep.worst_decomposition, c.decomposition);
    rep.worst_underestimator_excess = std::max(rep.worst_underestimator_excess, c.excess);
    rep.worst_tightness = std::max(rep.worst_tightness, c.tightness);
    rep.worst_power_excess = std::max(rep.worst_power_excess, c.power_excess);
    rep.worst_trace_drop = std::max(rep.worst_trace_drop, c.trace_drop);
    rep.worst_trace_identity = std::max(rep.worst_trace_identity, c.trace_identity);
    rep.own_coordinate_violations += c.own_violations;
    if (c.decomposition > kDecompositionTol)
      rep.failures.push_back(where + "decomposition residual " + format_double(c.decomposition));
    if (c.excess > kMinorantTol)
      rep.failures.push_back(where + "minorant exceeds rate by " + format_double(c.excess));
    if (c.tightness > kTightnessTol)
      rep.failures.push_back(where + "minorant not tight at anchor, gap " +
                             format_double(c.tightness));
    if (c.power_excess > kPowerTol)
      rep.failures.push_back(where + "power budget exceeded by " + format_double(c.power_excess));
    if (c.trace_identity > kPowerTol * cfg.power_budget)
      rep.failures.push_back(where + "trace power differs from the per-stream sum by " +
                             format_double(c.trace_identity));
    if (c.trace_drop > kAscentTol)
      rep.failures.push_back(where + "CCP objective decreased by " + format_double(c.trace_drop));
  }
  return rep;
}

std::vector<std::pair<double, double>> read_overlay_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read overlay file " + path.string());
  std::vector<std::pair<double, double>> pts;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double a = 0.0, b = 0.0;
    bool parsed = false;
    if (comma != std::string::npos) {
      const auto end = line.data() + line.size();
      const auto ra = std::from_chars(line.data(), line.data() + comma, a);
      const auto rb = std::from_chars(line.data() + comma + 1, end, b);
      parsed = ra.ec == std::errc{} && ra.ptr == line.data() + comma && rb.ec == std::errc{} &&
               rb.ptr == end;
    }
    if (!parsed) {
      if (first) {
        first = false;
        continue;
      }
      throw ConfigError("bad overlay row: " + line);
    }
    first = false;
    pts.emplace_back(a, b);
  }
  return pts;
}

}  // namespace stnoma
