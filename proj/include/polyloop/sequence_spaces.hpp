#pragma once

// Fourier-mode models of L^2(S^1, C^n) and the weighted spaces L^2_r, with
// the operators D_s, cos_r D_s and the polarisation J acting mode by mode.
//
// A vector of L^2 is the sequence (a_p) of its Fourier coefficients; the
// L^2_r norm weights mode p by r^{|p|}.  Operators act exactly on truncated
// vectors: multiplication by a Laurent polynomial of degree d grows the mode
// bound by d and never clips.

#include <vector>

#include "polyloop/laurent.hpp"

namespace polyloop {

/// Orthonormal basis {v_j} (columns) of C^n together with real shifts s_j.
class ShiftData {
 public:
  ShiftData(Matrix basis, std::vector<double> shifts);
  static ShiftData standard(Eigen::Index n, double shift = 0.0);

  Eigen::Index dim() const { return basis_.rows(); }
  const Matrix& basis() const { return basis_; }
  const std::vector<double>& shifts() const { return shifts_; }

 private:
  Matrix basis_;
  std::vector<double> shifts_;
};

/// Coefficients a_p in C^n for |p| <= P, stored as an n x (2P+1) matrix.
class LoopVector {
 public:
  LoopVector(Eigen::Index dim, int bound);
  LoopVector(int bound, Matrix coeffs);

  /// v_j z^p for the standard basis vector e_j.
  static LoopVector basis(Eigen::Index dim, int bound, int p, Eigen::Index j);

  Eigen::Index dim() const { return coeffs_.rows(); }
  int bound() const { return bound_; }
  const Matrix& coeffs() const { return coeffs_; }
  auto mode(int p) const { return coeffs_.col(p + bound_); }
  auto mode(int p) { return coeffs_.col(p + bound_); }

  /// Same vector with a larger mode bound (zero padded).
  LoopVector padded(int bound) const;

 private:
  int bound_;
  Matrix coeffs_;
};

double l2_norm(const LoopVector& v);
/// sqrt(sum_p r^{2|p|} ||a_p||^2).  Rejects r <= 1.
double l2r_norm(const LoopVector& v, double r);

/// Mode (p, j) scales by i (p + s_j) in the {v_j} basis.
LoopVector apply_D_s(const LoopVector& v, const ShiftData& s);
/// Mode (p, j) scales by cosh((p + s_j) ln r).
LoopVector apply_cos_r(const LoopVector& v, const ShiftData& s, double r);
LoopVector apply_cos_r_inverse(const LoopVector& v, const ShiftData& s, double r);
/// Mode p scales by i sign(p), with sign(0) = +1.
LoopVector apply_J(const LoopVector& v);
/// Pointwise multiplication by a square Laurent polynomial; the output mode
/// bound is P + deg(a).
LoopVector apply_loop(const MatrixLoop& a, const LoopVector& v);

/// Inner product declaring cos_r D_s : L^2_r -> L^2 isometric.
cplx l2r_inner_product(const LoopVector& a, const LoopVector& b, const ShiftData& s, double r);

/// Hilbert-Schmidt norm of [M_a, J] on L^2(S^1, C^n).
///
/// The commutator sends mode q to mode q + k with block i (sign q - sign(q+k)) A_k,
/// which is non-zero for exactly |k| values of q.  Hence
///   ||[M_a, J]||_HS^2 = sum_k 4 |k| ||A_k||_F^2.
double hs_commutator_norm(const MatrixLoop& a);

/// Partial Hilbert-Schmidt norms of [C^{-1} M_a C, J], C = cos_r D_s, over
/// the modes |p|, |q| <= P' for P' = 0, 1, ..., bound.  Entry P' of the
/// result is the truncated norm at P'.
std::vector<double> conjugated_hs_tail(const MatrixLoop& a, const ShiftData& s, double r, int bound);

struct HsDiagnosticRow {
  int degree;
  Eigen::Index dim;
  double hs_norm;
  double oracle_norm;
  double abs_err;
};

void to_json(nlohmann::json& j, const LoopVector& v);
LoopVector loop_vector_from_json(const nlohmann::json& j);

}  // namespace polyloop
