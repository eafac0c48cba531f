#pragma once

#include <complex>

#include <Eigen/Dense>

namespace stnoma {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Pivots (or singular values) below this fraction of the largest one count as zero.
inline constexpr double kRankTolerance = 1e-10;

struct QrFactors {
  CMatrix q;  // m x m, unitary
  CMatrix r;  // m x n, upper triangular, real nonnegative diagonal
};

/// Householder QR, A = Q R, followed by a phase pass that makes every
/// diagonal entry of R real and nonnegative. Rank-deficient input is fine;
/// it shows up as zero diagonal entries.
///
/// Throws std::invalid_argument if A holds NaN or Inf.
QrFactors qr_real_diag(const CMatrix& a);

/// Orthonormal basis of null(H) as the columns of an n x d matrix,
/// d = n - rank(H). Returns an n x 0 matrix when the null space is trivial.
CMatrix null_space_basis(const CMatrix& h);

/// Orthonormal basis of the vectors orthogonal to both column spans of
/// nb1 and nb2 (each with orthonormal columns and the same row count N).
/// With both inputs empty this is I_N.
CMatrix joint_null_space(const CMatrix& nb1, const CMatrix& nb2);

bool all_finite(const CMatrix& a);

// ||Q^H Q - I||_F
double unitarity_error(const CMatrix& q);

// Largest |entry| strictly below the main diagonal.
double lower_triangle_max(const CMatrix& r);

}  // namespace stnoma
