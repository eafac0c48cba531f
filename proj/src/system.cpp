#include "stnoma/system.hpp"

#include <algorithm>
#include <cmath>

namespace stnoma {

void validate(const SystemConfig& cfg) {
  derive_dims(cfg.antennas);
  if (!(cfg.pathloss2 > 0.0) || !(cfg.pathloss1 > cfg.pathloss2))
    throw ConfigError("path losses must satisfy pathloss1 > pathloss2 > 0");
  if (!(cfg.power_budget > 0.0)) throw ConfigError("power budget must be positive");
  if (!(cfg.noise_power > 0.0)) throw ConfigError("noise power must be positive");
}

StreamDims derive_dims(int n_bs, int m1, int m2) {
  if (n_bs < 1 || m1 < 1 || m2 < 1) throw ConfigError("antenna counts must be at least 1");
  if (m1 + m2 < n_bs)
    throw ConfigError("M1 + M2 < N is not supported: the precoder would need more streams "
                      "than the users have antennas");
  StreamDims d;
  d.total = std::min(m1 + m2, n_bs);
  d.private1 = std::max(0, std::min(m1, d.total - m2));
  d.private2 = std::max(0, std::min(m2, d.total - m1));
  d.shared = n_bs - d.private1 - d.private2;
  return d;
}

ChannelPair sample_channels(Rng& rng, int n_bs, int m1, int m2) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  auto draw = [&](int rows) {
    CMatrix h(rows, n_bs);
    // Row-major fill so the draw order does not depend on Eigen's storage.
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < n_bs; ++j) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        h(i, j) = cdouble(re, im);
      }
    return h;
  };
  ChannelPair ch;
  ch.h1 = draw(m1);
  ch.h2 = draw(m2);
  return ch;
}

Rng trial_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

SystemConfig config_from_scenario(const Antennas& antennas, double d1, double d2,
                                  double exponent, double pt_dbm, double sigma2_dbm) {
  if (!(d2 > 0.0) || !(d1 > d2)) throw ConfigError("distances must satisfy d1 > d2 > 0");
  SystemConfig cfg;
  cfg.antennas = antennas;
  cfg.pathloss1 = std::pow(d1, exponent);
  cfg.pathloss2 = std::pow(d2, exponent);
  cfg.power_budget = dbm_to_watts(pt_dbm);
  cfg.noise_power = dbm_to_watts(sigma2_dbm);
  return cfg;
}

}  // namespace stnoma
