#include "stnoma/region.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "stnoma/parallel.hpp"

namespace stnoma {

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kStNoma: return "st_noma";
    case Scheme::kOma: return "oma";
    case Scheme::kP2pUser1: return "p2p_user1";
    case Scheme::kP2pUser2: return "p2p_user2";
    case Scheme::kHybrid: return "hybrid";
  }
  return "unknown";
}

std::vector<double> uniform_grid(int steps) {
  if (steps < 1) throw std::invalid_argument("grid needs at least one point");
  if (steps == 1) return {0.5};
  std::vector<double> g(steps);
  for (int i = 0; i < steps; ++i) g[i] = static_cast<double>(i) / (steps - 1);
  return g;
}

std::vector<double> water_filling(std::span<const double> gains, double budget) {
  std::vector<double> powers(gains.size(), 0.0);
  if (!(budget > 0.0)) return powers;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < gains.size(); ++i)
    if (gains[i] > 0.0) order.push_back(i);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });

  // Largest active set whose water level clears every active floor 1/g.
  double level = 0.0;
  std::size_t active = 0;
  double floors = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    floors += 1.0 / gains[order[k]];
    const double candidate = (budget + floors) / static_cast<double>(k + 1);
    if (candidate <= 1.0 / gains[order[k]]) break;
    level = candidate;
    active = k + 1;
  }
  for (std::size_t k = 0; k < active; ++k)
    powers[order[k]] = std::max(0.0, level - 1.0 / gains[order[k]]);
  return powers;
}

double p2p_capacity(const CMatrix& h, double pathloss, double budget, double noise) {
  const Eigen::JacobiSVD<CMatrix> svd(h);
  const auto& sv = svd.singularValues();
  std::vector<double> gains(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) gains[i] = sv[i] * sv[i] / (pathloss * noise);
  const auto powers = water_filling(gains, budget);
  double rate = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) rate += std::log2(1.0 + gains[i] * powers[i]);
  return rate;
}

std::vector<RateRegionPoint> oma_line(double c1, double c2, std::span<const double> tau_grid,
                                      int trials) {
  std::vector<RateRegionPoint> pts;
  for (double tau : tau_grid) pts.push_back({tau * c1, (1.0 - tau) * c2, Scheme::kOma, tau, trials});
  return pts;
}

std::vector<RateRegionPoint> oma_region(const ChannelPair& ch, const SystemConfig& cfg,
                                        std::span<const double> tau_grid) {
  const double c1 = p2p_capacity(ch.h1, cfg.pathloss1, cfg.power_budget, cfg.noise_power);
  const double c2 = p2p_capacity(ch.h2, cfg.pathloss2, cfg.power_budget, cfg.noise_power);
  return oma_line(c1, c2, tau_grid, 1);
}

ErgodicRegion st_noma_region(const SystemConfig& cfg, std::span<const double> mu_grid, int trials,
                             std::uint64_t seed, const SolverSettings& settings, int workers) {
  validate(cfg);
  validate(settings);
  if (trials < 1) throw std::invalid_argument("at least one trial is required");
  const auto dims = derive_dims(cfg.antennas);
  const std::size_t n_mu = mu_grid.size();

  struct TrialResult {
    std::vector<double> r1, r2;
    double c1 = 0.0, c2 = 0.0;
    double power_excess = -1.0;
    int unconverged = 0;
  };
  std::vector<TrialResult> per_trial(trials);

  parallel_for(per_trial.size(), workers, [&](std::size_t t) {
    auto rng = trial_rng(seed, t);
    const auto ch = sample_channels(rng, cfg.antennas);
    const auto d = simultaneous_triangularize(ch, dims);
    TrialResult& out = per_trial[t];
    out.r1.resize(n_mu);
    out.r2.resize(n_mu);
    out.power_excess = -cfg.power_budget;
    for (std::size_t i = 0; i < n_mu; ++i) {
      const auto res = ccp_allocate(d, cfg, mu_grid[i], settings);
      validate(res.power, dims, cfg.power_budget);
      const auto rates = rate_breakdown(res.power, d, cfg);
      out.r1[i] = rates.total1;
      out.r2[i] = rates.total2;
      out.power_excess = std::max(out.power_excess, res.power.total() - cfg.power_budget);
      if (!res.state.converged) ++out.unconverged;
    }
    out.c1 = p2p_capacity(ch.h1, cfg.pathloss1, cfg.power_budget, cfg.noise_power);
    out.c2 = p2p_capacity(ch.h2, cfg.pathloss2, cfg.power_budget, cfg.noise_power);
  });

  ErgodicRegion region;
  region.trials = trials;
  region.worst_power_excess = -cfg.power_budget;
  std::vector<double> sum1(n_mu, 0.0), sum2(n_mu, 0.0);
  for (const auto& tr : per_trial) {
    for (std::size_t i = 0; i < n_mu; ++i) {
      sum1[i] += tr.r1[i];
      sum2[i] += tr.r2[i];
    }
    region.capacity1 += tr.c1;
    region.capacity2 += tr.c2;
    region.worst_power_excess = std::max(region.worst_power_excess, tr.power_excess);
    region.ccp_unconverged += tr.unconverged;
  }
  const double n = static_cast<double>(trials);
  region.capacity1 /= n;
  region.capacity2 /= n;
  for (std::size_t i = 0; i < n_mu; ++i)
    region.st_points.push_back({sum1[i] / n, sum2[i] / n, Scheme::kStNoma, mu_grid[i], trials});
  return region;
}

namespace {

double cross(const RateRegionPoint& o, const RateRegionPoint& a, const RateRegionPoint& b) {
  return (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1);
}

}  // namespace

std::vector<RateRegionPoint> hybrid_region(std::span<const RateRegionPoint> st_points,
                                           const RateRegionPoint& corner1,
                                           const RateRegionPoint& corner2) {
  std::vector<RateRegionPoint> pts(st_points.begin(), st_points.end());
  pts.push_back(corner1);
  pts.push_back(corner2);
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.r1 != b.r1 ? a.r1 < b.r1 : a.r2 > b.r2;
  });

  // Upper hull, left to right, collinear points dropped.
  std::vector<RateRegionPoint> upper;
  for (const auto& p : pts) {
    while (upper.size() >= 2 && cross(upper[upper.size() - 2], upper.back(), p) >= 0.0)
      upper.pop_back();
    upper.push_back(p);
  }

  std::vector<RateRegionPoint> frontier;
  for (const auto& p : upper) {
    const bool dominated = std::any_of(upper.begin(), upper.end(), [&](const auto& o) {
      return o.r1 >= p.r1 && o.r2 >= p.r2 && (o.r1 > p.r1 || o.r2 > p.r2);
    });
    if (!dominated) frontier.push_back(p);
  }
  const int trials = std::max(corner1.trials, corner2.trials);
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    frontier[i].scheme = Scheme::kHybrid;
    frontier[i].param = static_cast<double>(i);
    frontier[i].trials = trials;
  }
  return frontier;
}

bool frontier_dominates(std::span<const RateRegionPoint> frontier, double r1, double r2,
                        double tol) {
  if (frontier.empty()) return false;
  if (r1 > frontier.back().r1 + tol) return false;
  if (r1 <= frontier.front().r1) return r2 <= frontier.front().r2 + tol;
  for (std::size_t i = 1; i < frontier.size(); ++i) {
    const auto& a = frontier[i - 1];
    const auto& b = frontier[i];
    if (r1 <= b.r1) {
      const double w = b.r1 > a.r1 ? (r1 - a.r1) / (b.r1 - a.r1) : 1.0;
      return r2 <= a.r2 + w * (b.r2 - a.r2) + tol;
    }
  }
  return r2 <= frontier.back().r2 + tol;
}

}  // namespace stnoma
