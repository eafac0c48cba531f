#include "stnoma/st_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stnoma {

namespace {

double relative_to(double value, double scale) { return scale > 0.0 ? value / scale : value; }

}  // namespace

CMatrix StDecomposition::expected_effective1() const {
  CMatrix e = CMatrix::Zero(r1.rows(), dims.total);
  e.leftCols(dims.user1_streams()) = r1;
  return e;
}

CMatrix StDecomposition::expected_effective2() const {
  CMatrix e = CMatrix::Zero(r2.rows(), dims.total);
  e.leftCols(dims.shared) = r2.leftCols(dims.shared);
  e.rightCols(dims.private2) = r2.rightCols(dims.private2);
  return e;
}

StDecomposition simultaneous_triangularize(const ChannelPair& ch, const StreamDims& dims) {
  const auto n = ch.h1.cols();
  if (ch.h2.cols() != n) throw std::invalid_argument("channel column counts differ");
  if (dims.total != std::min<Eigen::Index>(ch.h1.rows() + ch.h2.rows(), n) ||
      dims.shared + dims.private1 + dims.private2 != dims.total)
    throw std::invalid_argument("stream dimensions do not match the channels");

  const CMatrix null1 = null_space_basis(ch.h1);  // carries user-2 private streams
  const CMatrix null2 = null_space_basis(ch.h2);  // carries user-1 private streams
  if (null1.cols() != dims.private2 || null2.cols() != dims.private1)
    throw NonGenericChannel("null space dimensions (" + std::to_string(null1.cols()) + ", " +
                            std::to_string(null2.cols()) + ") differ from the generic (" +
                            std::to_string(dims.private2) + ", " +
                            std::to_string(dims.private1) + ")");
  const CMatrix k = joint_null_space(null1, null2);
  if (k.cols() != dims.shared)
    throw NonGenericChannel("joint null space has dimension " + std::to_string(k.cols()) +
                            ", expected " + std::to_string(dims.shared));

  StDecomposition d;
  d.dims = dims;
  d.x.resize(n, dims.total);
  d.x << k, null2, null1;

  // QR of H1 [K null(H2)] and H2 [K null(H1)]; the columns that each user
  // cannot see are left out so the factorization never sees zero columns.
  CMatrix basis1(n, dims.user1_streams());
  basis1 << k, null2;
  CMatrix basis2(n, dims.user2_streams());
  basis2 << k, null1;

  auto f1 = qr_real_diag(ch.h1 * basis1);
  auto f2 = qr_real_diag(ch.h2 * basis2);
  d.q1 = f1.q.adjoint();
  d.q2 = f2.q.adjoint();
  d.r1 = std::move(f1.r);
  d.r2 = std::move(f2.r);
  return d;
}

double DecompositionReport::worst() const {
  return std::max({unitarity1, unitarity2, effective1, effective2, triangularity, diagonal,
                   column_norm});
}

DecompositionReport verify_decomposition(const StDecomposition& d, const ChannelPair& ch) {
  DecompositionReport rep;
  const double s1 = ch.h1.norm();
  const double s2 = ch.h2.norm();
  rep.unitarity1 = unitarity_error(d.q1);
  rep.unitarity2 = unitarity_error(d.q2);
  rep.effective1 = relative_to((d.q1 * ch.h1 * d.x - d.expected_effective1()).norm(), s1);
  rep.effective2 = relative_to((d.q2 * ch.h2 * d.x - d.expected_effective2()).norm(), s2);
  rep.triangularity = std::max(relative_to(lower_triangle_max(d.r1), s1),
                               relative_to(lower_triangle_max(d.r2), s2));

  auto diag_defect = [](const CMatrix& r, double scale) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < std::min(r.rows(), r.cols()); ++i) {
      worst = std::max(worst, std::abs(r(i, i).imag()));
      worst = std::max(worst, -r(i, i).real());
    }
    return relative_to(worst, scale);
  };
  rep.diagonal = std::max(diag_defect(d.r1, s1), diag_defect(d.r2, s2));

  for (Eigen::Index c = 0; c < d.x.cols(); ++c)
    rep.column_norm = std::max(rep.column_norm, std::abs(d.x.col(c).norm() - 1.0));
  return rep;
}

}  // namespace stnoma
