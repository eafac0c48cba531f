#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "stnoma/power.hpp"
#include "stnoma/rates.hpp"
#include "test_util.hpp"

using namespace stnoma;

namespace {

struct Instance {
  ChannelPair ch;
  StDecomposition d;
  SystemConfig cfg;
  PowerAllocation p;
};

Instance make(std::uint64_t seed, int n, int m1, int m2) {
  Rng rng = trial_rng(seed, 0);
  Instance in;
  in.cfg = testutil::reference_config(n, m1, m2);
  in.ch = sample_channels(rng, n, m1, m2);
  in.d = simultaneous_triangularize(in.ch, derive_dims(n, m1, m2));
  in.p = PowerAllocation::zeros(in.d.dims);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  for (int l = 0; l < in.d.dims.total; ++l) {
    const auto o = in.d.dims.owner(l);
    if (o != StreamOwner::kPrivate2) in.p.p1[l] = u(rng);
    if (o != StreamOwner::kPrivate1) in.p.p2[l] = u(rng);
  }
  return in;
}

}  // namespace

TEST_CASE("trivial rate values") {
  auto in = make(1, 5, 3, 3);
  const auto& d = in.d;
  const double s2 = in.cfg.noise_power;
  SUBCASE("no user-1 power gives zero rate") {
    in.p.p1[0] = 0.0;
    CHECK(rate_user1_shared_at_user1(in.p, d, in.cfg.pathloss1, s2, 0) == 0.0);
    CHECK(rate_user1_shared_at_user2(in.p, d, in.cfg.pathloss2, s2, 0) == 0.0);
  }
  SUBCASE("unit SNR gives one bit") {
    std::fill(in.p.p2.begin(), in.p.p2.end(), 0.0);
    in.p.p1[0] = in.cfg.pathloss1 * s2 / std::norm(d.r1(0, 0));
    CHECK(rate_user1_shared_at_user1(in.p, d, in.cfg.pathloss1, s2, 0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    in.p.p1[0] = in.cfg.pathloss2 * s2 / std::norm(d.r2(0, 0));
    CHECK(rate_user1_shared_at_user2(in.p, d, in.cfg.pathloss2, s2, 0) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("zero user-1 power gives an all-zero user-1 vector") {
    std::fill(in.p.p1.begin(), in.p.p1.end(), 0.0);
    for (double r : rate_user1(in.p, d, in.cfg)) CHECK(r == 0.0);
  }
  SUBCASE("out-of-range shared index") {
    CHECK_THROWS_AS(rate_user1_shared_at_user1(in.p, d, 1.0, 1.0, 1), std::out_of_range);
  }
}

TEST_CASE("rates from factors recomputed via the channel products") {
  for (auto [n, m1, m2] : {std::tuple{5, 3, 3}, {3, 2, 2}, {6, 4, 4}, {5, 4, 2}, {4, 2, 2}}) {
    const auto in = make(2 + n + m1, n, m1, m2);
    const auto& dims = in.d.dims;
    const CMatrix e1 = in.d.q1 * in.ch.h1 * in.d.x;  // M1 x L
    const CMatrix e2 = in.d.q2 * in.ch.h2 * in.d.x;  // M2 x L, global columns
    const double s2 = in.cfg.noise_power, pl1 = in.cfg.pathloss1, pl2 = in.cfg.pathloss2;
    const auto r1 = rate_user1(in.p, in.d, in.cfg);
    const auto r2 = rate_user2(in.p, in.d, in.cfg);
    REQUIRE(r1.size() == static_cast<std::size_t>(dims.total));
    for (int l = 0; l < dims.total; ++l) {
      double want1 = 0.0, want2 = 0.0;
      const auto o = dims.owner(l);
      if (o == StreamOwner::kShared) {
        double interf = 0.0;
        for (int lp = l; lp < dims.shared; ++lp) interf += in.p.p2[lp] * std::norm(e1(l, lp));
        const double at1 = std::log2(1.0 + in.p.p1[l] * std::norm(e1(l, l)) / pl1 /
                                               (s2 + interf / pl1));
        const double g2 = std::norm(e2(l, l)) / pl2;
        const double at2 = std::log2(1.0 + in.p.p1[l] * g2 / (s2 + in.p.p2[l] * g2));
        want1 = std::min(at1, at2);
        want2 = std::log2(1.0 + in.p.p2[l] * g2 / s2);
      } else if (o == StreamOwner::kPrivate1) {
        want1 = std::log2(1.0 + in.p.p1[l] * std::norm(e1(l, l)) / (pl1 * s2));
      } else {
        // Row of user 2's local index, column of the global stream.
        const int j = l - dims.private1;
        want2 = std::log2(1.0 + in.p.p2[l] * std::norm(e2(j, l)) / (pl2 * s2));
      }
      CHECK(testutil::rel(r1[l], want1) <= 1e-9);
      CHECK(testutil::rel(r2[l], want2) <= 1e-9);
    }
  }
}

TEST_CASE("the minimum picks the near user's decoding rate when it is the bottleneck") {
  auto in = make(3, 3, 2, 2);
  // No user-2 power on stream 1 removes interference at user 2 but not at user 1
  // for stream 0; enlarge p2[0] so user 2 is the bottleneck.
  in.p.p2[0] = 0.9;
  in.p.p1[0] = 0.05;
  const auto b = rate_breakdown(in.p, in.d, in.cfg);
  const double at1 = b.r1_at1[0], at2 = b.r1_at2[0];
  CHECK(b.r1[0] == std::min(at1, at2));
  in.cfg.pathloss2 = in.cfg.pathloss1 * 0.999;
  const auto c = rate_breakdown(in.p, in.d, in.cfg);
  CHECK(c.r1[0] == std::min(c.r1_at1[0], c.r1_at2[0]));
}

TEST_CASE("weighted sum rate endpoints and midpoint") {
  const auto in = make(4, 5, 3, 3);
  const auto b = rate_breakdown(in.p, in.d, in.cfg);
  CHECK(b.total1 == doctest::Approx(std::accumulate(b.r1.begin(), b.r1.end(), 0.0)));
  CHECK(weighted_sum_rate(in.p, in.d, in.cfg, 1.0) == doctest::Approx(b.total1).epsilon(1e-14));
  CHECK(weighted_sum_rate(in.p, in.d, in.cfg, 0.0) == doctest::Approx(b.total2).epsilon(1e-14));
  CHECK(weighted_sum_rate(in.p, in.d, in.cfg, 0.5) ==
        doctest::Approx((b.total1 + b.total2) / 2).epsilon(1e-14));
  CHECK_THROWS_AS(weighted_sum_rate(in.p, in.d, in.cfg, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(weighted_sum_rate(in.p, in.d, in.cfg, -0.1), std::invalid_argument);
}

TEST_CASE("support pattern of the rate vectors") {
  const auto in = make(5, 5, 3, 3);
  const auto r1 = rate_user1(in.p, in.d, in.cfg);
  const auto r2 = rate_user2(in.p, in.d, in.cfg);
  for (int l = 0; l < in.d.dims.total; ++l) {
    CHECK(r1[l] >= 0.0);
    CHECK(r2[l] >= 0.0);
    if (in.d.dims.owner(l) == StreamOwner::kPrivate1) CHECK(r2[l] == 0.0);
    if (in.d.dims.owner(l) == StreamOwner::kPrivate2) CHECK(r1[l] == 0.0);
  }
}

TEST_CASE("rates are nondecreasing in their own power") {
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto in = make(seed, 6, 4, 4);
    const auto base1 = rate_breakdown(in.p, in.d, in.cfg);
    for (int l = 0; l < in.d.dims.total; ++l) {
      auto q = in.p;
      if (in.d.dims.owner(l) != StreamOwner::kPrivate2) {
        q.p1[l] += 1e-3;
        const auto b = rate_breakdown(q, in.d, in.cfg);
        CHECK(b.r1[l] >= base1.r1[l]);
        q = in.p;
      }
      if (in.d.dims.owner(l) != StreamOwner::kPrivate1) {
        q.p2[l] += 1e-3;
        const auto b = rate_breakdown(q, in.d, in.cfg);
        CHECK(b.r2[l] >= base1.r2[l]);
      }
    }
  }
}

TEST_CASE("DC pieces reproduce both decoding rates") {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    const auto in = make(seed, 6, 4, 4);
    const auto b = rate_breakdown(in.p, in.d, in.cfg);
    for (int l = 0; l < in.d.dims.shared; ++l) {
      const auto c = dc_components(in.p, in.d, in.cfg, l);
      CHECK(std::abs((c.r11 - c.r12) - b.r1_at1[l]) <= 1e-12);
      CHECK(std::abs((c.r21 - c.r22) - b.r1_at2[l]) <= 1e-12);
    }
  }
}

TEST_CASE("residual interference after cancellation matches the SINR denominator") {
  // Moderate path loss and noise keep the Monte Carlo well conditioned.
  Rng rng = trial_rng(50, 0);
  const auto dims = derive_dims(6, 4, 4);
  const auto ch = sample_channels(rng, 6, 4, 4);
  const auto d = simultaneous_triangularize(ch, dims);
  const double pl1 = 4.0, sigma2 = 0.05;
  auto p = PowerAllocation::zeros(dims);
  for (int l = 0; l < dims.total; ++l) {
    if (dims.owner(l) != StreamOwner::kPrivate2) p.p1[l] = 0.1;
    if (dims.owner(l) != StreamOwner::kPrivate1) p.p2[l] = 0.1 + 0.05 * l;
  }
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  auto draw = [&](int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
    return v;
  };
  std::vector<double> acc(dims.shared, 0.0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const CVector s1 = draw(dims.total), s2 = draw(dims.total);
    const CVector x = transmit(d.x, build_symbol_vector(s1, s2, p));
    const CVector y1 = receive_and_detect(ch.h1, pl1, d.q1, x, std::sqrt(sigma2) * draw(4));
    const auto c = decode_user1(y1, d, p, pl1, s1);
    for (int l = 0; l < dims.shared; ++l) {
      const cdouble wanted = std::sqrt(p.p1[l] / pl1) * d.r1(l, l) * s1(l);
      acc[l] += std::norm(c.values(l) - wanted);
    }
  }
  for (int l = 0; l < dims.shared; ++l) {
    double denom = sigma2;
    for (int lp = l; lp < dims.shared; ++lp) denom += p.p2[lp] * std::norm(d.r1(l, lp)) / pl1;
    CHECK(std::abs(acc[l] / draws - denom) <= 0.02 * denom);
  }
}
