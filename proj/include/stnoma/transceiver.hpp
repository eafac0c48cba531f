#pragma once

#include <vector>

#include "stnoma/st_core.hpp"

namespace stnoma {

/// Per-stream transmit powers in watts, indexed by global stream l.
/// p2 vanishes on private1 streams and p1 on private2 streams.
struct PowerAllocation {
  std::vector<double> p1;
  std::vector<double> p2;

  static PowerAllocation zeros(const StreamDims& dims);
  double total() const;
};

/// Throws std::invalid_argument on wrong lengths, negative entries, a
/// violated support pattern, or sum(p1 + p2) > budget + slack.
void validate(const PowerAllocation& p, const StreamDims& dims, double budget,
              double slack = 1e-9);

/// Power-domain superposition s[l] = sqrt(p1[l]) s1[l] + sqrt(p2[l]) s2[l].
CVector build_symbol_vector(const CVector& s1, const CVector& s2, const PowerAllocation& p);

/// x = X s.
CVector transmit(const CMatrix& x, const CVector& s);

/// Q_k ((1/sqrt(pathloss)) H_k x + noise).
CVector receive_and_detect(const CMatrix& h, double pathloss, const CMatrix& q,
                           const CVector& x, const CVector& noise);

/// Self-interference-free observations of one user in its local stream
/// order (user 1: shared then private1; user 2: shared then private2).
struct CancelledSignals {
  int user = 0;
  CVector values;
};

// The decoders are genie-aided: the true symbols stand in for decisions.

/// Far user. Private streams are peeled off in reverse order, then the
/// shared streams, again in reverse; the near user's shared symbols remain
/// as interference. Never touches s2.
CancelledSignals decode_user1(const CVector& y1, const StDecomposition& d,
                              const PowerAllocation& p, double pathloss1, const CVector& s1);

/// Near user. Same two phases; on shared streams both users' symbols are
/// cancelled once decoded, leaving rho2_ll (sqrt(p1/Pi2) s1 + sqrt(p2/Pi2) s2).
CancelledSignals decode_user2(const CVector& y2, const StDecomposition& d,
                              const PowerAllocation& p, double pathloss2, const CVector& s1,
                              const CVector& s2);

}  // namespace stnoma
