#include "stnoma/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

namespace stnoma {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458;

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Coeffs = std::vector<std::pair<int, double>>;

// weight * log2(1 + sum_i coeff_i z_i), coefficients nonnegative.
struct LogTerm {
  double weight = 0.0;
  Coeffs coeffs;

  double arg(const VectorXd& z) const {
    double s = 1.0;
    for (const auto& [i, c] : coeffs) s += c * z[i];
    return s;
  }
};

// constant + linear . z + sum of log terms; concave.
struct ConcaveFn {
  double constant = 0.0;
  Coeffs linear;
  std::vector<LogTerm> logs;

  double value(const VectorXd& z) const {
    double v = constant;
    for (const auto& [i, c] : linear) v += c * z[i];
    for (const auto& t : logs) {
      const double a = t.arg(z);
      if (!(a > 0.0)) return -std::numeric_limits<double>::infinity();
      v += t.weight * std::log2(a);
    }
    return v;
  }

  void add_gradient(const VectorXd& z, double scale, VectorXd& g) const {
    for (const auto& [i, c] : linear) g[i] += scale * c;
    for (const auto& t : logs) {
      const double f = scale * t.weight / (kLn2 * t.arg(z));
      for (const auto& [i, c] : t.coeffs) g[i] += f * c;
    }
  }

  void add_hessian(const VectorXd& z, double scale, MatrixXd& h) const {
    for (const auto& t : logs) {
      const double a = t.arg(z);
      const double f = -scale * t.weight / (kLn2 * a * a);
      for (const auto& [i, ci] : t.coeffs)
        for (const auto& [j, cj] : t.coeffs) h(i, j) += f * ci * cj;
    }
  }
};

// Maximize objective(z) subject to constraint_j(z) > 0.
struct BarrierProblem {
  int size = 0;
  ConcaveFn objective;
  std::vector<ConcaveFn> constraints;

  // -tau * objective - sum log(constraint); +inf outside the domain.
  double barrier(const VectorXd& z, double tau) const {
    double phi = -tau * objective.value(z);
    for (const auto& c : constraints) {
      const double v = c.value(z);
      if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
      phi -= std::log(v);
    }
    return std::isfinite(phi) ? phi : std::numeric_limits<double>::infinity();
  }

  void derivatives(const VectorXd& z, double tau, VectorXd& g, MatrixXd& h) const {
    g.setZero(size);
    h.setZero(size, size);
    objective.add_gradient(z, -tau, g);
    objective.add_hessian(z, -tau, h);
    VectorXd gc(size);
    for (const auto& c : constraints) {
      const double v = c.value(z);
      gc.setZero();
      c.add_gradient(z, 1.0, gc);
      g -= gc / v;
      h.noalias() += (gc * gc.transpose()) / (v * v);
      c.add_hessian(z, -1.0 / v, h);
    }
  }
};

struct BarrierOutcome {
  VectorXd z;
  double gap = std::numeric_limits<double>::infinity();
  int steps = 0;
  bool converged = false;
};

BarrierOutcome run_barrier(const BarrierProblem& prob, VectorXd z, const SolverSettings& s) {
  constexpr double kArmijo = 1e-4;
  constexpr double kBacktrack = 0.5;
  constexpr double kGrowth = 10.0;
  constexpr double kCentered = 1e-12;  // half the squared Newton decrement

  BarrierOutcome out;
  const double m = static_cast<double>(prob.constraints.size());
  double tau = 1.0;
  VectorXd g;
  MatrixXd h;
  for (;;) {
    // Centering.
    for (;;) {
      if (out.steps >= s.inner_max_iters) {
        out.z = std::move(z);
        out.gap = m / tau;
        return out;
      }
      prob.derivatives(z, tau, g, h);
      Eigen::LDLT<MatrixXd> ldlt(h);
      VectorXd step = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) step = -g;
      const double decrement = -g.dot(step);
      if (!(decrement > 2.0 * kCentered)) break;

      const double phi0 = prob.barrier(z, tau);
      double t = 1.0;
      VectorXd trial = z + step;
      double phi = prob.barrier(trial, tau);
      // Near the center take the full step once it is feasible; rounding in
      // phi at large tau would otherwise stall the Armijo test.
      const bool quadratic_region = decrement < 0.1;
      while (!std::isfinite(phi) ||
             (!quadratic_region && phi > phi0 - kArmijo * t * decrement)) {
        t *= kBacktrack;
        if (t < 1e-20) break;
        trial = z + t * step;
        phi = prob.barrier(trial, tau);
      }
      ++out.steps;
      if (t < 1e-20) break;
      z = std::move(trial);
    }
    const double gap = m / tau;
    const double target = s.inner_tol * std::max(1.0, std::abs(prob.objective.value(z)));
    if (gap <= target) {
      out.z = std::move(z);
      out.gap = gap;
      out.converged = true;
      return out;
    }
    tau *= kGrowth;
  }
}

// Variable layout of P2: p1 on user-1 streams, p2 on user-2 streams, and
// one epigraph variable per shared stream.
struct Layout {
  std::vector<int> p1;  // per global stream, -1 where structurally zero
  std::vector<int> p2;
  std::vector<int> t;   // per shared stream
  int powers = 0;
  int size = 0;
};

Layout make_layout(const StreamDims& dims) {
  Layout lay;
  lay.p1.assign(dims.total, -1);
  lay.p2.assign(dims.total, -1);
  int next = 0;
  for (int l = 0; l < dims.total; ++l) {
    const auto owner = dims.owner(l);
    if (owner != StreamOwner::kPrivate2) lay.p1[l] = next++;
    if (owner != StreamOwner::kPrivate1) lay.p2[l] = next++;
  }
  lay.powers = next;
  for (int l = 0; l < dims.shared; ++l) lay.t.push_back(next++);
  lay.size = next;
  return lay;
}

// P2(q) with every gain divided by the noise power. The log2(sigma^2)
// offsets of the four concave pieces cancel in the surrogate.
struct Surrogate {
  Layout lay;
  BarrierProblem prob;
  std::vector<ConcaveFn> decode1;  // r11 + r22 per shared stream
  std::vector<ConcaveFn> decode2;  // r21 + r12 per shared stream

  Surrogate(const StDecomposition& d, const SystemConfig& cfg, double mu,
            std::span<const double> q, Linearization lin)
      : lay(make_layout(d.dims)) {
    const auto& dims = d.dims;
    const int shared = dims.shared;
    const double inv1 = 1.0 / (cfg.pathloss1 * cfg.noise_power);
    const double inv2 = 1.0 / (cfg.pathloss2 * cfg.noise_power);
    auto a = [&](int l, int lp) { return std::norm(d.rho1(l, lp)) * inv1; };
    auto e = [&](int l) { return std::norm(d.rho2(l, l)) * inv2; };

    prob.size = lay.size;
    ConcaveFn& obj = prob.objective;

    for (int l = 0; l < shared; ++l) {
      Coeffs interference;
      double anchor_sum = 1.0;
      for (int lp = l; lp < shared; ++lp) {
        interference.emplace_back(lay.p2[lp], a(l, lp));
        anchor_sum += a(l, lp) * q[lp];
      }
      const double own_anchor = 1.0 + e(l) * q[l];

      // mu * (t_l - g_l(q) - grad g_l(q) . (p2 - q))
      obj.linear.emplace_back(lay.t[l], mu);
      obj.constant -= mu * (std::log2(anchor_sum) + std::log2(own_anchor));
      const int last = lin == Linearization::kFullGradient ? shared : l + 1;
      for (int lp = l; lp < last; ++lp) {
        double slope = a(l, lp) / (kLn2 * anchor_sum);
        if (lp == l) slope += e(l) / (kLn2 * own_anchor);
        obj.linear.emplace_back(lay.p2[lp], -mu * slope);
        obj.constant += mu * slope * q[lp];
      }

      Coeffs with_signal = interference;
      with_signal.emplace_back(lay.p1[l], a(l, l));
      const LogTerm r11{1.0, with_signal};
      const LogTerm r12{1.0, interference};
      const LogTerm r21{1.0, {{lay.p1[l], e(l)}, {lay.p2[l], e(l)}}};
      const LogTerm r22{1.0, {{lay.p2[l], e(l)}}};
      decode1.push_back(ConcaveFn{0.0, {}, {r11, r22}});
      decode2.push_back(ConcaveFn{0.0, {}, {r21, r12}});

      if (mu < 1.0) obj.logs.push_back(LogTerm{1.0 - mu, {{lay.p2[l], e(l)}}});
    }
    for (int l = shared; l < dims.user1_streams(); ++l)
      if (mu > 0.0) obj.logs.push_back(LogTerm{mu, {{lay.p1[l], a(l, l)}}});
    for (int l = dims.user1_streams(); l < dims.total; ++l) {
      const int j = d.user2_local(l);
      if (mu < 1.0)
        obj.logs.push_back(LogTerm{1.0 - mu, {{lay.p2[l], std::norm(d.rho2(j, j)) * inv2}}});
    }

    for (int i = 0; i < lay.powers; ++i) prob.constraints.push_back(ConcaveFn{0.0, {{i, 1.0}}, {}});
    ConcaveFn budget{cfg.power_budget, {}, {}};
    for (int i = 0; i < lay.powers; ++i) budget.linear.emplace_back(i, -1.0);
    prob.constraints.push_back(std::move(budget));
    for (int l = 0; l < shared; ++l) {
      ConcaveFn c1 = decode1[l];
      c1.linear.emplace_back(lay.t[l], -1.0);
      ConcaveFn c2 = decode2[l];
      c2.linear.emplace_back(lay.t[l], -1.0);
      prob.constraints.push_back(std::move(c1));
      prob.constraints.push_back(std::move(c2));
    }
  }

  // Epigraph variables set to their tight value min{decode1, decode2}.
  void tighten(VectorXd& z) const {
    for (std::size_t l = 0; l < lay.t.size(); ++l)
      z[lay.t[l]] = std::min(decode1[l].value(z), decode2[l].value(z));
  }

  VectorXd pack(const PowerAllocation& p) const {
    VectorXd z = VectorXd::Zero(lay.size);
    for (std::size_t l = 0; l < lay.p1.size(); ++l) {
      if (lay.p1[l] >= 0) z[lay.p1[l]] = p.p1[l];
      if (lay.p2[l] >= 0) z[lay.p2[l]] = p.p2[l];
    }
    tighten(z);
    return z;
  }

  PowerAllocation unpack(const VectorXd& z) const {
    PowerAllocation p{std::vector<double>(lay.p1.size(), 0.0),
                      std::vector<double>(lay.p2.size(), 0.0)};
    for (std::size_t l = 0; l < lay.p1.size(); ++l) {
      if (lay.p1[l] >= 0) p.p1[l] = std::max(0.0, z[lay.p1[l]]);
      if (lay.p2[l] >= 0) p.p2[l] = std::max(0.0, z[lay.p2[l]]);
    }
    return p;
  }

  double value(const PowerAllocation& p) const { return prob.objective.value(pack(p)); }
};

double log2_noise_plus(double noise, double x) { return std::log2(noise + x); }

void check_anchor(std::span<const double> q, const StreamDims& dims) {
  if (static_cast<int>(q.size()) != dims.shared)
    throw std::invalid_argument("anchor length must equal the shared stream count");
  for (double v : q)
    if (!(v >= 0.0)) throw std::invalid_argument("anchor powers must be nonnegative");
}

}  // namespace

void validate(const SolverSettings& s) {
  if (s.ccp_max_iters < 1 || !(s.ccp_tol >= 0.0) || !(s.inner_tol > 0.0) ||
      s.inner_max_iters < 1)
    throw std::invalid_argument("solver settings must be positive");
}

DcComponents dc_components(const PowerAllocation& p, const StDecomposition& d,
                           const SystemConfig& cfg, int l) {
  if (l < 0 || l >= d.dims.shared) throw std::out_of_range("not a shared stream index");
  double interference = 0.0;
  for (int lp = l; lp < d.dims.shared; ++lp) interference += p.p2[lp] * std::norm(d.rho1(l, lp));
  interference /= cfg.pathloss1;
  const double g1 = std::norm(d.rho1(l, l)) / cfg.pathloss1;
  const double g2 = std::norm(d.rho2(l, l)) / cfg.pathloss2;
  const double s = cfg.noise_power;
  DcComponents c;
  c.r11 = log2_noise_plus(s, interference + p.p1[l] * g1);
  c.r12 = log2_noise_plus(s, interference);
  c.r21 = log2_noise_plus(s, (p.p1[l] + p.p2[l]) * g2);
  c.r22 = log2_noise_plus(s, p.p2[l] * g2);
  return c;
}

MinIdentity min_identity_check(double a, double b, double c, double d) {
  return {std::min(a - b, c - d), std::min(a + d, c + b) - (b + d)};
}

double underestimator(const PowerAllocation& p, std::span<const double> q,
                      const StDecomposition& d, const SystemConfig& cfg, int l,
                      Linearization lin) {
  check_anchor(q, d.dims);
  const auto at_p = dc_components(p, d, cfg, l);

  PowerAllocation anchored = p;
  for (int lp = 0; lp < d.dims.shared; ++lp) anchored.p2[lp] = q[lp];
  const auto at_q = dc_components(anchored, d, cfg, l);

  // Slopes of r12 + r22 at q; 2^r is the argument of each log.
  const double s12 = std::exp2(at_q.r12);
  const double s22 = std::exp2(at_q.r22);
  const int last = lin == Linearization::kFullGradient ? d.dims.shared : l + 1;
  double f = 0.0;
  for (int lp = l; lp < last; ++lp) {
    double slope = std::norm(d.rho1(l, lp)) / cfg.pathloss1 / (kLn2 * s12);
    if (lp == l) slope += std::norm(d.rho2(l, l)) / cfg.pathloss2 / (kLn2 * s22);
    f += slope * (p.p2[lp] - q[lp]);
  }
  return std::min(at_p.r11 + at_p.r22, at_p.r21 + at_p.r12) - (at_q.r12 + at_q.r22) - f;
}

double surrogate_objective(const PowerAllocation& p, std::span<const double> q,
                           const StDecomposition& d, const SystemConfig& cfg, double mu,
                           Linearization lin) {
  const auto r1 = rate_user1(p, d, cfg);
  const auto r2 = rate_user2(p, d, cfg);
  double total = 0.0;
  for (int l = 0; l < d.dims.total; ++l) {
    const double user1 = l < d.dims.shared ? underestimator(p, q, d, cfg, l, lin) : r1[l];
    total += mu * user1 + (1.0 - mu) * r2[l];
  }
  return total;
}

P2Solution solve_p2(std::span<const double> q, const StDecomposition& d, const SystemConfig& cfg,
                    double mu, const SolverSettings& settings) {
  check_anchor(q, d.dims);
  validate(settings);
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("weight mu must lie in [0, 1]");

  const Surrogate sur(d, cfg, mu, q, settings.linearization);
  P2Solution sol;
  if (!(cfg.power_budget > 0.0)) {
    sol.power = PowerAllocation::zeros(d.dims);
    sol.objective = sur.value(sol.power);
    sol.converged = true;
    return sol;
  }

  VectorXd z0 = VectorXd::Zero(sur.lay.size);
  z0.head(sur.lay.powers).setConstant(cfg.power_budget / (sur.lay.powers + 1));
  sur.tighten(z0);
  for (int t : sur.lay.t) z0[t] -= 1.0;

  auto out = run_barrier(sur.prob, std::move(z0), settings);
  sol.power = sur.unpack(out.z);
  sol.objective = sur.value(sol.power);
  sol.duality_gap = out.gap;
  sol.newton_steps = out.steps;
  sol.converged = out.converged;
  return sol;
}

CcpResult ccp_allocate(const StDecomposition& d, const SystemConfig& cfg, double mu,
                       const SolverSettings& settings) {
  validate(settings);
  CcpState st;
  st.anchor.assign(d.dims.shared, 0.0);
  // No previous iterate yet: stands in for p^(0) = -inf.
  std::optional<PowerAllocation> previous;

  for (int n = 1; n <= settings.ccp_max_iters; ++n) {
    auto sol = solve_p2(st.anchor, d, cfg, mu, settings);
    if (!sol.converged) ++st.inner_failures;
    PowerAllocation next = std::move(sol.power);
    if (previous) {
      // The previous iterate is feasible for this surrogate and attains the
      // true objective there; keep it if the solve landed lower.
      const Surrogate sur(d, cfg, mu, st.anchor, settings.linearization);
      if (sur.value(*previous) > sur.value(next)) next = *previous;
    }
    st.iteration = n;
    st.objective_trace.push_back(weighted_sum_rate(next, d, cfg, mu));
    for (int l = 0; l < d.dims.shared; ++l) st.anchor[l] = next.p2[l];

    bool settled = false;
    if (previous) {
      double moved = 0.0;
      for (int l = 0; l < d.dims.total; ++l)
        moved = std::max({moved, std::abs(next.p1[l] - previous->p1[l]),
                          std::abs(next.p2[l] - previous->p2[l])});
      settled = moved < settings.ccp_tol;
    }
    previous = next;
    if (settled) {
      st.converged = true;
      break;
    }
  }
  st.current = *previous;
  return {st.current, std::move(st)};
}

}  // namespace stnoma
