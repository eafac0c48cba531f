#pragma once

#include <vector>

#include "stnoma/transceiver.hpp"

namespace stnoma {

// All rates in bits per channel use. Stream indices are global and 0-based.

/// Rate of s1[l] (shared l) at the far user; the near user's shared symbols
/// on streams l..M-1 count as noise.
double rate_user1_shared_at_user1(const PowerAllocation& p, const StDecomposition& d,
                                  double pathloss1, double noise, int l);

/// Rate of s1[l] (shared l) at the near user, which decodes it first with
/// only s2[l] as interference.
double rate_user1_shared_at_user2(const PowerAllocation& p, const StDecomposition& d,
                                  double pathloss2, double noise, int l);

/// Shared streams take the minimum of the two decoding rates.
std::vector<double> rate_user1(const PowerAllocation& p, const StDecomposition& d,
                               const SystemConfig& cfg);
std::vector<double> rate_user2(const PowerAllocation& p, const StDecomposition& d,
                               const SystemConfig& cfg);

struct RateBreakdown {
  std::vector<double> r1;
  std::vector<double> r2;
  std::vector<double> r1_at1;  // shared streams only, length M
  std::vector<double> r1_at2;
  double total1 = 0.0;
  double total2 = 0.0;
};

RateBreakdown rate_breakdown(const PowerAllocation& p, const StDecomposition& d,
                             const SystemConfig& cfg);

/// sum_l mu r1[l] + (1 - mu) r2[l]; mu must lie in [0, 1].
double weighted_sum_rate(const PowerAllocation& p, const StDecomposition& d,
                         const SystemConfig& cfg, double mu);

}  // namespace stnoma
