#pragma once

#include <stdexcept>

#include "stnoma/linalg.hpp"
#include "stnoma/system.hpp"

namespace stnoma {

/// Channel realization for which the null spaces do not have their generic
/// dimensions (rank-deficient fading matrices).
class NonGenericChannel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Simultaneous triangularization of two MIMO channels:
///
///   Q1 H1 X = [R1, 0]          (zero block: the user-2 private columns)
///   Q2 H2 X = [R2', 0, R2'']   (zero block: the user-1 private columns)
///
/// X = [K, null(H2), null(H1)] has unit-norm columns; stream l maps to
/// column l of X. R1 is M1 x (M + Mbar1) and R2 = [R2', R2''] is
/// M2 x (M + Mbar2); both are upper triangular with real nonnegative
/// diagonals.
struct StDecomposition {
  CMatrix x;
  CMatrix q1;
  CMatrix q2;
  CMatrix r1;
  CMatrix r2;
  StreamDims dims;

  /// rho^(1)_{row,col}, user-1 local indices (equal to global stream indices).
  cdouble rho1(int row, int col) const { return r1(row, col); }
  /// rho^(2)_{row,col} in user-2 local indices: shared streams keep their
  /// index, private2 stream l sits at l - Mbar1.
  cdouble rho2(int row, int col) const { return r2(row, col); }

  /// Local user-2 index of global stream l (shared or private2).
  int user2_local(int l) const { return l < dims.shared ? l : l - dims.private1; }

  /// The L-wide matrices Q_k H_k X would equal in exact arithmetic.
  CMatrix expected_effective1() const;
  CMatrix expected_effective2() const;
};

/// Builds X, Q1, Q2, R1, R2. Throws std::invalid_argument on shape mismatch
/// and NonGenericChannel when a null space has the wrong dimension.
StDecomposition simultaneous_triangularize(const ChannelPair& ch, const StreamDims& dims);

struct DecompositionReport {
  double unitarity1 = 0.0;    // ||Q1^H Q1 - I||_F
  double unitarity2 = 0.0;
  double effective1 = 0.0;    // ||Q1 H1 X - [R1 0]||_F / ||H1||_F
  double effective2 = 0.0;    // ||Q2 H2 X - [R2' 0 R2'']||_F / ||H2||_F
  double triangularity = 0.0; // largest sub-diagonal |entry| of R1, R2, relative to ||H_k||_F
  double diagonal = 0.0;      // largest |imag| or negative real part on the diagonals, relative
  double column_norm = 0.0;   // max_l | ||x_l|| - 1 |

  double worst() const;
};

DecompositionReport verify_decomposition(const StDecomposition& d, const ChannelPair& ch);

}  // namespace stnoma
