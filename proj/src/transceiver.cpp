#include "stnoma/transceiver.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace stnoma {

PowerAllocation PowerAllocation::zeros(const StreamDims& dims) {
  return {std::vector<double>(dims.total, 0.0), std::vector<double>(dims.total, 0.0)};
}

double PowerAllocation::total() const {
  return std::accumulate(p1.begin(), p1.end(), 0.0) + std::accumulate(p2.begin(), p2.end(), 0.0);
}

void validate(const PowerAllocation& p, const StreamDims& dims, double budget, double slack) {
  const auto len = static_cast<std::size_t>(dims.total);
  if (p.p1.size() != len || p.p2.size() != len)
    throw std::invalid_argument("power allocation length differs from the stream count");
  for (int l = 0; l < dims.total; ++l) {
    if (!(p.p1[l] >= 0.0) || !(p.p2[l] >= 0.0))
      throw std::invalid_argument("negative power on stream " + std::to_string(l));
    const auto owner = dims.owner(l);
    if (owner == StreamOwner::kPrivate1 && p.p2[l] != 0.0)
      throw std::invalid_argument("user-2 power on private1 stream " + std::to_string(l));
    if (owner == StreamOwner::kPrivate2 && p.p1[l] != 0.0)
      throw std::invalid_argument("user-1 power on private2 stream " + std::to_string(l));
  }
  if (p.total() > budget + slack) throw std::invalid_argument("power budget exceeded");
}

CVector build_symbol_vector(const CVector& s1, const CVector& s2, const PowerAllocation& p) {
  const auto len = s1.size();
  if (s2.size() != len || static_cast<Eigen::Index>(p.p1.size()) != len ||
      static_cast<Eigen::Index>(p.p2.size()) != len)
    throw std::invalid_argument("symbol and power lengths differ");
  CVector s(len);
  for (Eigen::Index l = 0; l < len; ++l)
    s(l) = std::sqrt(p.p1[l]) * s1(l) + std::sqrt(p.p2[l]) * s2(l);
  return s;
}

CVector transmit(const CMatrix& x, const CVector& s) {
  if (x.cols() != s.size()) throw std::invalid_argument("precoder width differs from symbol length");
  return x * s;
}

CVector receive_and_detect(const CMatrix& h, double pathloss, const CMatrix& q,
                           const CVector& x, const CVector& noise) {
  if (h.cols() != x.size() || h.rows() != noise.size() || q.cols() != h.rows())
    throw std::invalid_argument("receive_and_detect: shape mismatch");
  return q * ((1.0 / std::sqrt(pathloss)) * (h * x) + noise);
}

CancelledSignals decode_user1(const CVector& y1, const StDecomposition& d,
                              const PowerAllocation& p, double pathloss1, const CVector& s1) {
  const int shared = d.dims.shared;
  const int own = d.dims.user1_streams();
  if (y1.size() < own || s1.size() != d.dims.total)
    throw std::invalid_argument("decode_user1: length mismatch");

  // Amplitude of each already-known user-1 symbol as it arrives at user 1.
  CVector known(own);
  for (int l = 0; l < own; ++l) known(l) = std::sqrt(p.p1[l] / pathloss1) * s1(l);

  CancelledSignals out{1, y1.head(own)};
  // Private streams first, then shared; both in reverse. Each row subtracts
  // every later column, so the phase split only fixes the order.
  auto cancel = [&](int l) {
    for (int lp = l + 1; lp < own; ++lp) out.values(l) -= d.rho1(l, lp) * known(lp);
  };
  for (int l = own - 1; l >= shared; --l) cancel(l);
  for (int l = shared - 1; l >= 0; --l) cancel(l);
  return out;
}

CancelledSignals decode_user2(const CVector& y2, const StDecomposition& d,
                              const PowerAllocation& p, double pathloss2, const CVector& s1,
                              const CVector& s2) {
  const int shared = d.dims.shared;
  const int own = d.dims.user2_streams();
  if (y2.size() < own || s1.size() != d.dims.total || s2.size() != d.dims.total)
    throw std::invalid_argument("decode_user2: length mismatch");

  // Known superposed amplitude per local user-2 row.
  const double inv = 1.0 / std::sqrt(pathloss2);
  CVector known(own);
  for (int j = 0; j < shared; ++j)
    known(j) = inv * (std::sqrt(p.p1[j]) * s1(j) + std::sqrt(p.p2[j]) * s2(j));
  for (int j = shared; j < own; ++j) {
    const int l = j + d.dims.private1;
    known(j) = inv * std::sqrt(p.p2[l]) * s2(l);
  }

  CancelledSignals out{2, y2.head(own)};
  auto cancel = [&](int j) {
    for (int jp = j + 1; jp < own; ++jp) out.values(j) -= d.rho2(j, jp) * known(jp);
  };
  for (int j = own - 1; j >= shared; --j) cancel(j);
  for (int j = shared - 1; j >= 0; --j) cancel(j);
  return out;
}

}  // namespace stnoma
