#include "stnoma/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace stnoma {

namespace {

using Eigen::Index;

struct Householder {
  CMatrix q;
  CMatrix r;
  std::vector<Index> perm;  // column k of R belongs to column perm[k] of A
};

// Householder QR with an optional greedy column pivot (largest remaining
// norm first). Q is accumulated explicitly; the sizes here are tiny.
Householder householder_qr(const CMatrix& a, bool pivot) {
  const Index m = a.rows();
  const Index n = a.cols();
  Householder out{CMatrix::Identity(m, m), a, std::vector<Index>(n)};
  std::iota(out.perm.begin(), out.perm.end(), Index{0});
  CMatrix& r = out.r;
  CMatrix& q = out.q;

  const Index steps = std::min(m, n);
  for (Index k = 0; k < steps; ++k) {
    if (pivot) {
      Index best = k;
      double best_norm = r.col(k).tail(m - k).squaredNorm();
      for (Index j = k + 1; j < n; ++j) {
        const double nj = r.col(j).tail(m - k).squaredNorm();
        if (nj > best_norm) {
          best = j;
          best_norm = nj;
        }
      }
      if (best != k) {
        r.col(k).swap(r.col(best));
        std::swap(out.perm[k], out.perm[best]);
      }
    }

    const Index len = m - k;
    if (len < 2 || r.col(k).tail(len - 1).norm() == 0.0) continue;

    CVector v = r.col(k).tail(len);
    const double xnorm = v.norm();
    const cdouble x0 = v(0);
    const cdouble phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : cdouble(1.0);
    const cdouble alpha = -phase * xnorm;
    v(0) -= alpha;
    const double scale = 2.0 / v.squaredNorm();

    auto block = r.bottomRightCorner(len, n - k);
    const Eigen::RowVectorXcd vh_block = v.adjoint() * block;
    block.noalias() -= scale * v * vh_block;
    r.col(k).tail(len - 1).setZero();
    r(k, k) = alpha;

    auto qcols = q.rightCols(len);
    const CVector qv = qcols * v;
    qcols.noalias() -= scale * qv * v.adjoint();
  }

  // Rotate each row of R (and the matching column of Q) so the diagonal is
  // real and nonnegative.
  for (Index k = 0; k < steps; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) {
      const cdouble ph = r(k, k) / mag;
      r.row(k) *= std::conj(ph);
      q.col(k) *= ph;
    }
    r(k, k) = cdouble(mag, 0.0);
    if (k + 1 < m) r.col(k).tail(m - k - 1).setZero();
  }
  return out;
}

}  // namespace

bool all_finite(const CMatrix& a) {
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

QrFactors qr_real_diag(const CMatrix& a) {
  if (!all_finite(a)) throw std::invalid_argument("qr_real_diag: non-finite input");
  auto h = householder_qr(a, false);
  return {std::move(h.q), std::move(h.r)};
}

CMatrix null_space_basis(const CMatrix& h) {
  if (!all_finite(h)) throw std::invalid_argument("null_space_basis: non-finite input");
  const Index n = h.cols();
  // Range of H^H is the orthogonal complement of null(H).
  const auto f = householder_qr(h.adjoint(), true);
  const Index steps = std::min(h.rows(), n);
  double largest = 0.0;
  for (Index k = 0; k < steps; ++k) largest = std::max(largest, f.r(k, k).real());
  Index rank = 0;
  if (largest > 0.0) {
    for (Index k = 0; k < steps; ++k)
      if (f.r(k, k).real() > kRankTolerance * largest) ++rank;
  }
  return f.q.rightCols(n - rank);
}

CMatrix joint_null_space(const CMatrix& nb1, const CMatrix& nb2) {
  if (nb1.rows() != nb2.rows())
    throw std::invalid_argument("joint_null_space: row count mismatch");
  const Index n = nb1.rows();
  CMatrix stacked(nb1.cols() + nb2.cols(), n);
  stacked.topRows(nb1.cols()) = nb1.adjoint();
  stacked.bottomRows(nb2.cols()) = nb2.adjoint();
  return null_space_basis(stacked);
}

double unitarity_error(const CMatrix& q) {
  return (q.adjoint() * q - CMatrix::Identity(q.cols(), q.cols())).norm();
}

double lower_triangle_max(const CMatrix& r) {
  double worst = 0.0;
  for (Index j = 0; j < r.cols(); ++j)
    for (Index i = j + 1; i < r.rows(); ++i) worst = std::max(worst, std::abs(r(i, j)));
  return worst;
}

}  // namespace stnoma
