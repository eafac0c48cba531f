#include "stnoma/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace stnoma {

namespace {

double gain(cdouble rho) { return std::norm(rho); }

double shannon(double snr) { return std::log2(1.0 + snr); }

void check_shared(const StDecomposition& d, int l) {
  if (l < 0 || l >= d.dims.shared) throw std::out_of_range("not a shared stream index");
}

}  // namespace

double rate_user1_shared_at_user1(const PowerAllocation& p, const StDecomposition& d,
                                  double pathloss1, double noise, int l) {
  check_shared(d, l);
  double interference = 0.0;
  for (int lp = l; lp < d.dims.shared; ++lp) interference += p.p2[lp] * gain(d.rho1(l, lp));
  const double signal = p.p1[l] * gain(d.rho1(l, l)) / pathloss1;
  return shannon(signal / (noise + interference / pathloss1));
}

double rate_user1_shared_at_user2(const PowerAllocation& p, const StDecomposition& d,
                                  double pathloss2, double noise, int l) {
  check_shared(d, l);
  const double g = gain(d.rho2(l, l)) / pathloss2;
  return shannon(p.p1[l] * g / (noise + p.p2[l] * g));
}

std::vector<double> rate_user1(const PowerAllocation& p, const StDecomposition& d,
                               const SystemConfig& cfg) {
  std::vector<double> r(d.dims.total, 0.0);
  for (int l = 0; l < d.dims.shared; ++l)
    r[l] = std::min(rate_user1_shared_at_user1(p, d, cfg.pathloss1, cfg.noise_power, l),
                    rate_user1_shared_at_user2(p, d, cfg.pathloss2, cfg.noise_power, l));
  for (int l = d.dims.shared; l < d.dims.user1_streams(); ++l)
    r[l] = shannon(p.p1[l] * gain(d.rho1(l, l)) / (cfg.pathloss1 * cfg.noise_power));
  return r;
}

std::vector<double> rate_user2(const PowerAllocation& p, const StDecomposition& d,
                               const SystemConfig& cfg) {
  std::vector<double> r(d.dims.total, 0.0);
  const double scale = cfg.pathloss2 * cfg.noise_power;
  for (int l = 0; l < d.dims.shared; ++l) r[l] = shannon(p.p2[l] * gain(d.rho2(l, l)) / scale);
  for (int l = d.dims.user1_streams(); l < d.dims.total; ++l) {
    const int j = d.user2_local(l);
    r[l] = shannon(p.p2[l] * gain(d.rho2(j, j)) / scale);
  }
  return r;
}

RateBreakdown rate_breakdown(const PowerAllocation& p, const StDecomposition& d,
                             const SystemConfig& cfg) {
  RateBreakdown b;
  b.r1 = rate_user1(p, d, cfg);
  b.r2 = rate_user2(p, d, cfg);
  for (int l = 0; l < d.dims.shared; ++l) {
    b.r1_at1.push_back(rate_user1_shared_at_user1(p, d, cfg.pathloss1, cfg.noise_power, l));
    b.r1_at2.push_back(rate_user1_shared_at_user2(p, d, cfg.pathloss2, cfg.noise_power, l));
  }
  b.total1 = std::accumulate(b.r1.begin(), b.r1.end(), 0.0);
  b.total2 = std::accumulate(b.r2.begin(), b.r2.end(), 0.0);
  return b;
}

double weighted_sum_rate(const PowerAllocation& p, const StDecomposition& d,
                         const SystemConfig& cfg, double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("weight mu must lie in [0, 1]");
  const auto r1 = rate_user1(p, d, cfg);
  const auto r2 = rate_user2(p, d, cfg);
  double total = 0.0;
  for (int l = 0; l < d.dims.total; ++l) total += mu * r1[l] + (1.0 - mu) * r2[l];
  return total;
}

}  // namespace stnoma
