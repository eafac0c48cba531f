#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "stnoma/linalg.hpp"

namespace stnoma {

/// Raised for configurations the precoding scheme does not cover.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Rng = std::mt19937_64;

struct Antennas {
  int n_bs = 0;  // N
  int m1 = 0;    // far user
  int m2 = 0;    // near user
};

struct SystemConfig {
  Antennas antennas;
  double pathloss1 = 1.0;  // far user, strictly larger than pathloss2
  double pathloss2 = 1.0;
  double power_budget = 1.0;  // watts
  double noise_power = 1.0;   // watts
  std::uint64_t seed = 0;
};

/// Throws ConfigError unless N, M1, M2 >= 1, M1 + M2 >= N,
/// pathloss1 > pathloss2 > 0, and both powers are positive.
void validate(const SystemConfig& cfg);

enum class StreamOwner { kShared, kPrivate1, kPrivate2 };

// Stream indices are 0-based: [0, shared) are NOMA streams received by both
// users, then private1 streams for the far user, then private2 streams.
struct StreamDims {
  int total = 0;     // L
  int private1 = 0;  // Mbar1
  int private2 = 0;  // Mbar2
  int shared = 0;    // M

  StreamOwner owner(int l) const {
    if (l < shared) return StreamOwner::kShared;
    if (l < shared + private1) return StreamOwner::kPrivate1;
    return StreamOwner::kPrivate2;
  }
  int user1_streams() const { return shared + private1; }
  int user2_streams() const { return shared + private2; }
};

/// Throws ConfigError for non-positive antenna counts or M1 + M2 < N.
StreamDims derive_dims(int n_bs, int m1, int m2);
inline StreamDims derive_dims(const Antennas& a) { return derive_dims(a.n_bs, a.m1, a.m2); }

struct ChannelPair {
  CMatrix h1;  // M1 x N small-scale fading, far user
  CMatrix h2;  // M2 x N small-scale fading, near user
};

/// i.i.d. CN(0, 1) entries.
ChannelPair sample_channels(Rng& rng, int n_bs, int m1, int m2);
inline ChannelPair sample_channels(Rng& rng, const Antennas& a) {
  return sample_channels(rng, a.n_bs, a.m1, a.m2);
}

/// Independent generator for Monte Carlo trial `index` under `seed`; the
/// stream depends only on (seed, index), never on scheduling.
Rng trial_rng(std::uint64_t seed, std::uint64_t index);

double dbm_to_watts(double dbm);

/// Path loss d^exponent per user, powers converted from dBm.
/// Throws ConfigError unless d1 > d2 > 0.
SystemConfig config_from_scenario(const Antennas& antennas, double d1, double d2,
                                  double exponent, double pt_dbm, double sigma2_dbm);

}  // namespace stnoma
