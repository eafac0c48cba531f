#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stnoma/transceiver.hpp"
#include "test_util.hpp"

using namespace stnoma;

namespace {

CVector random_symbols(Rng& rng, int n) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  CVector s(n);
  for (int i = 0; i < n; ++i) s(i) = {g(rng), g(rng)};
  return s;
}

PowerAllocation random_power(Rng& rng, const StreamDims& dims, double budget) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto p = PowerAllocation::zeros(dims);
  for (int l = 0; l < dims.total; ++l) {
    const auto o = dims.owner(l);
    if (o != StreamOwner::kPrivate2) p.p1[l] = u(rng);
    if (o != StreamOwner::kPrivate1) p.p2[l] = u(rng);
  }
  const double scale = budget / p.total();
  for (auto& v : p.p1) v *= scale;
  for (auto& v : p.p2) v *= scale;
  return p;
}

double rel_err(cdouble got, cdouble want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace

TEST_CASE("symbol vector construction") {
  const auto dims = derive_dims(2, 2, 2);
  auto p = PowerAllocation::zeros(dims);
  p.p1 = {0.5, 0.25};
  CVector s1(2), s2(2);
  s1 << cdouble(1, 0), cdouble(0, 1);
  s2 << cdouble(1, 0), cdouble(3, 0);
  CVector s = build_symbol_vector(s1, s2, p);
  CHECK(std::abs(s(0) - std::sqrt(0.5)) <= 1e-15);
  CHECK(std::abs(s(1) - cdouble(0, 0.5)) <= 1e-15);
  p.p2 = {0.5, 0.0};
  s = build_symbol_vector(s1, s2, p);
  CHECK(std::abs(s(0) - 1.4142135623730951) <= 1e-15);
}

TEST_CASE("mean transmit power equals the allocated total") {
  Rng rng = trial_rng(1, 0);
  const auto ch = sample_channels(rng, 5, 3, 3);
  const auto dims = derive_dims(5, 3, 3);
  const auto d = simultaneous_triangularize(ch, dims);
  const auto p = random_power(rng, dims, 1.0);
  double acc = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const CVector x = transmit(d.x, build_symbol_vector(random_symbols(rng, 5),
                                                        random_symbols(rng, 5), p));
    acc += x.squaredNorm();
  }
  CHECK(std::abs(acc / draws - p.total()) <= 0.02 * p.total());
  // Trace form of the power constraint agrees with the per-stream sum.
  CVector w(dims.total);
  for (int l = 0; l < dims.total; ++l) w(l) = p.p1[l] + p.p2[l];
  const cdouble tr = (d.x * w.asDiagonal() * d.x.adjoint()).trace();
  CHECK(std::abs(tr - p.total()) <= 1e-12);
}

TEST_CASE("transmit is a plain product") {
  Rng rng = trial_rng(2, 0);
  const CMatrix x = testutil::random_matrix(rng, 4, 3);
  CVector e = CVector::Zero(3);
  e(1) = 1.0;
  CHECK((transmit(x, e) - x.col(1)).norm() == 0.0);
  const CVector s = random_symbols(rng, 3);
  CVector direct = CVector::Zero(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) direct(i) += x(i, j) * s(j);
  CHECK((transmit(x, s) - direct).norm() <= 1e-14);
  CHECK_THROWS_AS(transmit(x, random_symbols(rng, 2)), std::invalid_argument);
}

TEST_CASE("noiseless reception matches the triangular closed form") {
  Rng rng = trial_rng(3, 0);
  const auto dims = derive_dims(5, 3, 3);
  const auto ch = sample_channels(rng, dims.total, 3, 3);
  const auto d = simultaneous_triangularize(ch, dims);
  const double pl1 = 62500.0, pl2 = 2500.0;
  const auto p = random_power(rng, dims, 1.0);
  const CVector s = build_symbol_vector(random_symbols(rng, 5), random_symbols(rng, 5), p);
  const CVector x = transmit(d.x, s);
  const CVector y1 = receive_and_detect(ch.h1, pl1, d.q1, x, CVector::Zero(3));
  const CVector y2 = receive_and_detect(ch.h2, pl2, d.q2, x, CVector::Zero(3));
  // User 1 sees R1 acting on its own streams; user 2 on shared plus private2.
  CVector s_user1 = s.head(dims.user1_streams());
  CVector s_user2(dims.user2_streams());
  s_user2 << s.head(dims.shared), s.tail(dims.private2);
  CHECK((y1 - d.r1 * s_user1 / std::sqrt(pl1)).norm() <= 1e-9 * y1.norm());
  CHECK((y2 - d.r2 * s_user2 / std::sqrt(pl2)).norm() <= 1e-9 * y2.norm());
  CHECK(receive_and_detect(ch.h1, pl1, d.q1, CVector::Zero(5), CVector::Zero(3)).norm() == 0.0);
}

TEST_CASE("detected noise keeps its covariance") {
  Rng rng = trial_rng(4, 0);
  const auto dims = derive_dims(5, 3, 3);
  const auto ch = sample_channels(rng, 5, 3, 3);
  const auto d = simultaneous_triangularize(ch, dims);
  const double sigma2 = 2.0;
  CMatrix cov = CMatrix::Zero(3, 3);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const CVector n = std::sqrt(sigma2) * random_symbols(rng, 3);
    const CVector y = receive_and_detect(ch.h1, 1.0, d.q1, CVector::Zero(5), n);
    cov += y * y.adjoint();
  }
  cov /= draws;
  CHECK((cov - sigma2 * CMatrix::Identity(3, 3)).norm() <= 0.05 * sigma2 * 3);
}

TEST_CASE("self-interference cancellation leaves the scalar channels") {
  Rng rng = trial_rng(5, 0);
  for (auto [n, m1, m2] : {std::tuple{5, 3, 3}, {2, 2, 2}, {4, 2, 2}, {5, 4, 2}, {6, 4, 4}}) {
    const auto dims = derive_dims(n, m1, m2);
    const double pl1 = 62500.0, pl2 = 2500.0;
    for (int t = 0; t < 20; ++t) {
      const auto ch = sample_channels(rng, n, m1, m2);
      const auto d = simultaneous_triangularize(ch, dims);
      const auto p = random_power(rng, dims, 1.0);
      const CVector s1 = random_symbols(rng, dims.total);
      const CVector s2 = random_symbols(rng, dims.total);
      const CVector x = transmit(d.x, build_symbol_vector(s1, s2, p));
      const CVector y1 = receive_and_detect(ch.h1, pl1, d.q1, x, CVector::Zero(m1));
      const CVector y2 = receive_and_detect(ch.h2, pl2, d.q2, x, CVector::Zero(m2));
      const auto c1 = decode_user1(y1, d, p, pl1, s1);
      const auto c2 = decode_user2(y2, d, p, pl2, s1, s2);
      REQUIRE(c1.values.size() == dims.user1_streams());
      REQUIRE(c2.values.size() == dims.user2_streams());
      for (int l = 0; l < dims.user1_streams(); ++l) {
        cdouble want = std::sqrt(p.p1[l] / pl1) * d.r1(l, l) * s1(l);
        if (l < dims.shared)
          for (int lp = l; lp < dims.shared; ++lp)
            want += d.r1(l, lp) * std::sqrt(p.p2[lp] / pl1) * s2(lp);
        CHECK(rel_err(c1.values(l), want) <= 1e-9);
      }
      for (int j = 0; j < dims.user2_streams(); ++j) {
        const int l = j < dims.shared ? j : j + dims.private1;
        CHECK(d.user2_local(l) == j);
        cdouble want = std::sqrt(p.p2[l] / pl2) * s2(l);
        if (j < dims.shared) want += std::sqrt(p.p1[l] / pl2) * s1(l);
        want *= d.r2(j, j);
        CHECK(rel_err(c2.values(j), want) <= 1e-9);
      }
    }
  }
}

TEST_CASE("user 1 never uses the near user's symbols") {
  Rng rng = trial_rng(6, 0);
  const auto dims = derive_dims(5, 3, 3);
  const auto ch = sample_channels(rng, 5, 3, 3);
  const auto d = simultaneous_triangularize(ch, dims);
  const auto p = random_power(rng, dims, 1.0);
  const CVector y1 = random_symbols(rng, 3);
  const CVector s1 = random_symbols(rng, 5);
  // The signature takes no s2; the result depends only on (y1, s1).
  const auto a = decode_user1(y1, d, p, 10.0, s1);
  const auto b = decode_user1(y1, d, p, 10.0, s1);
  CHECK((a.values - b.values).norm() == 0.0);
}

TEST_CASE("single shared stream needs no cancellation") {
  ChannelPair ch{CMatrix::Constant(1, 1, cdouble(0.3, 0.4)), CMatrix::Constant(1, 1, 2.0)};
  const auto dims = derive_dims(1, 1, 1);
  const auto d = simultaneous_triangularize(ch, dims);
  auto p = PowerAllocation::zeros(dims);
  p.p1[0] = 0.3;
  p.p2[0] = 0.7;
  CVector y(1);
  y(0) = cdouble(1.5, -2.0);
  CVector s(1);
  s(0) = 1.0;
  CHECK(decode_user1(y, d, p, 1.0, s).values(0) == y(0));
  CHECK(decode_user2(y, d, p, 1.0, s, s).values(0) == y(0));
}

TEST_CASE("power allocation validation") {
  const auto dims = derive_dims(5, 3, 3);
  auto p = PowerAllocation::zeros(dims);
  CHECK_NOTHROW(validate(p, dims, 1.0));
  p.p1[0] = 0.6;
  p.p2[0] = 0.4;
  CHECK_NOTHROW(validate(p, dims, 1.0));
  p.p2[0] = 0.5;
  CHECK_THROWS_AS(validate(p, dims, 1.0), std::invalid_argument);
  p = PowerAllocation::zeros(dims);
  p.p2[1] = 0.1;  // private1 stream
  CHECK_THROWS_AS(validate(p, dims, 1.0), std::invalid_argument);
  p = PowerAllocation::zeros(dims);
  p.p1[4] = 0.1;  // private2 stream
  CHECK_THROWS_AS(validate(p, dims, 1.0), std::invalid_argument);
  p = PowerAllocation::zeros(dims);
  p.p1[0] = -1e-3;
  CHECK_THROWS_AS(validate(p, dims, 1.0), std::invalid_argument);
  p.p1.pop_back();
  CHECK_THROWS_AS(validate(p, dims, 1.0), std::invalid_argument);
}
