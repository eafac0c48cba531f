#pragma once

#include <span>
#include <vector>

#include "stnoma/rates.hpp"

namespace stnoma {

/// How the concave part R12 + R22 of a shared stream is linearized around
/// the anchor q.
enum class Linearization {
  /// Only the p2[l] coordinate, as in the published f_l. Not a guaranteed
  /// minorizer: R12 at stream l also depends on p2[l'] for l' > l.
  kOwnCoordinate,
  /// Every p2[l'], l' >= l. A true first-order minorizer.
  kFullGradient,
};

struct SolverSettings {
  int ccp_max_iters = 10;
  double ccp_tol = 1e-4;     // watts
  double inner_tol = 1e-8;   // duality gap relative to max(1, |objective|)
  int inner_max_iters = 10000;  // Newton steps per P2 solve
  Linearization linearization = Linearization::kFullGradient;
};

void validate(const SolverSettings& s);

/// The four concave pieces of a shared stream's two decoding rates:
/// R1_l^(1) = r11 - r12 and R1_l^(2) = r21 - r22.
struct DcComponents {
  double r11 = 0.0;
  double r12 = 0.0;
  double r21 = 0.0;
  double r22 = 0.0;
};

DcComponents dc_components(const PowerAllocation& p, const StDecomposition& d,
                           const SystemConfig& cfg, int l);

struct MinIdentity {
  double lhs = 0.0;  // min{A - B, C - D}
  double rhs = 0.0;  // min{A + D, C + B} - (B + D)
};

MinIdentity min_identity_check(double a, double b, double c, double d);

/// Minorant of the shared-stream rate R1_l built around anchor powers q
/// (length M, one per shared stream):
///   min{r11 + r22, r21 + r12}(p) - (r12 + r22)(q) - f_l(p, q).
/// Tight at p2 = q.
double underestimator(const PowerAllocation& p, std::span<const double> q,
                      const StDecomposition& d, const SystemConfig& cfg, int l,
                      Linearization lin = Linearization::kFullGradient);

/// Weighted sum rate with every shared-stream R1_l replaced by its minorant.
double surrogate_objective(const PowerAllocation& p, std::span<const double> q,
                           const StDecomposition& d, const SystemConfig& cfg, double mu,
                           Linearization lin = Linearization::kFullGradient);

struct P2Solution {
  PowerAllocation power;
  double objective = 0.0;     // surrogate value at `power`
  double duality_gap = 0.0;   // certified bound on (optimum - objective)
  int newton_steps = 0;
  bool converged = false;
};

/// Maximizes the surrogate over {p >= 0 on the support pattern, sum p <= P_T}
/// with a log-barrier interior-point method on the epigraph form (one
/// auxiliary variable per shared-stream min). Returns the last iterate with
/// converged = false if the Newton budget runs out.
P2Solution solve_p2(std::span<const double> q, const StDecomposition& d, const SystemConfig& cfg,
                    double mu, const SolverSettings& settings = {});

struct CcpState {
  std::vector<double> anchor;       // q, one entry per shared stream
  PowerAllocation current;
  int iteration = 0;
  std::vector<double> objective_trace;  // true weighted sum rate per iteration
  bool converged = false;
  int inner_failures = 0;
};

struct CcpResult {
  PowerAllocation power;
  CcpState state;
};

/// Convex-concave procedure: start from q = 0, solve P2(q), move the anchor
/// to the new p2 on the shared streams, and stop once no power moves by
/// ccp_tol or after ccp_max_iters. The true objective is nondecreasing
/// because the previous iterate stays a candidate for every surrogate.
CcpResult ccp_allocate(const StDecomposition& d, const SystemConfig& cfg, double mu,
                       const SolverSettings& settings = {});

}  // namespace stnoma
