#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "stnoma/power.hpp"

namespace stnoma {

enum class Scheme { kStNoma, kOma, kP2pUser1, kP2pUser2, kHybrid };

std::string_view scheme_name(Scheme s);

struct RateRegionPoint {
  double r1 = 0.0;  // bits per channel use
  double r2 = 0.0;
  Scheme scheme = Scheme::kStNoma;
  double param = 0.0;  // mu for st_noma, tau for oma and corners, vertex index for hybrid
  int trials = 0;
};

/// `steps` uniformly spaced values covering [0, 1] (steps >= 2), or {0.5}
/// for steps == 1.
std::vector<double> uniform_grid(int steps);

/// Powers maximizing sum log2(1 + g_i p_i) subject to sum p_i <= budget.
std::vector<double> water_filling(std::span<const double> gains, double budget);

/// Single-user MIMO capacity of (1/sqrt(pathloss)) H with water-filling over
/// the squared singular values.
double p2p_capacity(const CMatrix& h, double pathloss, double budget, double noise);

/// TDMA line (tau c1, (1 - tau) c2) for every tau in the grid.
std::vector<RateRegionPoint> oma_line(double c1, double c2, std::span<const double> tau_grid,
                                      int trials);

/// OMA line of one channel realization at full power per slot.
std::vector<RateRegionPoint> oma_region(const ChannelPair& ch, const SystemConfig& cfg,
                                        std::span<const double> tau_grid);

struct ErgodicRegion {
  std::vector<RateRegionPoint> st_points;  // one per mu
  double capacity1 = 0.0;  // ergodic point-to-point capacities
  double capacity2 = 0.0;
  int trials = 0;
  double worst_power_excess = 0.0;  // max over trials of sum(p) - P_T
  int ccp_unconverged = 0;
};

/// Ergodic ST-NOMA rate pairs for every mu, averaged over `trials` channel
/// draws. Trial t always uses trial_rng(seed, t); per-trial results are
/// summed in trial order, so the output does not depend on `workers`.
ErgodicRegion st_noma_region(const SystemConfig& cfg, std::span<const double> mu_grid, int trials,
                             std::uint64_t seed, const SolverSettings& settings = {},
                             int workers = 1);

/// Upper-right Pareto frontier of the convex hull of the ST points and the
/// two point-to-point corners, ordered by increasing r1.
std::vector<RateRegionPoint> hybrid_region(std::span<const RateRegionPoint> st_points,
                                           const RateRegionPoint& corner1,
                                           const RateRegionPoint& corner2);

/// True when (r1, r2) lies in the region below the piecewise-linear frontier
/// (frontier points sorted by r1, as from hybrid_region), within tol.
bool frontier_dominates(std::span<const RateRegionPoint> frontier, double r1, double r2,
                        double tol = 1e-9);

}  // namespace stnoma
