#pragma once

// Spectral calculus on unitary and skew-Hermitian matrices: branch
// logarithms, the exponential, the central logarithm of a unitary, and the
// unitary structures J_xi attached to real skew matrices without kernel.

#include <optional>
#include <vector>

#include "polyloop/laurent.hpp"

namespace polyloop {

/// Eigenvalues closer than this are treated as one eigenspace.
inline constexpr double kClusterTol = 1e-7;

/// Eigenvalues and orthonormal eigenvectors (columns) of a normal matrix.
struct EigenDecomp {
  Vector eigenvalues;
  Matrix vectors;

  /// Index groups of eigenvalues within `tol` of each other (single linkage).
  std::vector<std::vector<Eigen::Index>> clusters(double tol = kClusterTol) const;
  Matrix projector(const std::vector<Eigen::Index>& cluster) const;
  Matrix reconstruct() const;
};

/// Complex Schur form of a normal matrix; the triangular factor is diagonal
/// up to round-off, so its unitary factor is an orthonormal eigenbasis even
/// under degeneracy.  Rejects matrices whose departure from normality
/// exceeds 1e-8.
EigenDecomp normal_eigen(const Matrix& g);

/// Element of u_n: xi^* = -xi.  Real-tagged elements of so_n have exactly
/// zero imaginary part.
class SkewMatrix {
 public:
  /// Checks skewness to `tol` and stores the exactly skew part.
  explicit SkewMatrix(const Matrix& m, double tol = 1e-10);
  static SkewMatrix real(const RealMatrix& m, double tol = 1e-10);
  static SkewMatrix zero(Eigen::Index n) { return real(RealMatrix::Zero(n, n)); }

  const Matrix& matrix() const { return m_; }
  RealMatrix real_matrix() const { return m_.real(); }
  Eigen::Index dim() const { return m_.rows(); }
  bool is_real() const { return real_; }

  /// Eigen-decomposition of the Hermitian matrix -i xi: xi = U diag(i mu) U^*.
  const Eigen::VectorXd& frequencies() const { return mu_; }
  const Matrix& eigenvectors() const { return u_; }
  double spectral_radius() const;

  /// exp(t xi), exactly real for real-tagged input.
  Matrix exp(double t = 1.0) const;

  SkewMatrix operator*(double c) const;
  SkewMatrix operator+(const SkewMatrix& o) const;
  SkewMatrix operator-(const SkewMatrix& o) const;
  SkewMatrix operator-() const { return *this * -1.0; }

 private:
  SkewMatrix(Matrix m, bool real, int);
  void decompose();

  Matrix m_;
  bool real_ = false;
  Eigen::VectorXd mu_;
  Matrix u_;
};

/// Real part of a skew matrix whose imaginary part is below `tol`.
SkewMatrix realify(const SkewMatrix& xi, double tol = 1e-9);

/// log_s g for s = i * centre: the logarithm with eigenvalues in
/// (s - i pi, s + i pi).  Throws BranchCutError when an eigenvalue lies within
/// 1e-8 of -e^s.
SkewMatrix log_branch(const Matrix& g, double centre);

Matrix exp_skew(const SkewMatrix& xi);

/// The logarithm of g built from its spectral projectors with eigenvalue
/// logarithms in [-i pi, i pi).  It is a polynomial in g, so it commutes with
/// every matrix commuting with g, in particular with every other logarithm.
SkewMatrix central_log(const Matrix& g);

struct PairLoop {
  MatrixLoop loop;
  double residual;
  int degree;
};

/// Smallest degree that can carry t -> exp(-t xi1) exp(t xi2) when it is a loop.
int pair_loop_degree(const SkewMatrix& xi1, const SkewMatrix& xi2);

/// Fourier projection of t -> exp(-t xi1) exp(t xi2), which is a polynomial
/// loop whenever exp(xi1) = exp(xi2).  `degree` < 0 selects
/// pair_loop_degree.  Rejects pairs whose exponentials differ by > 1e-9.
PairLoop eta_pair_loop(const SkewMatrix& xi1, const SkewMatrix& xi2, int degree = -1, int grid = kDefaultGrid);

/// Block-diagonal [[0,-1],[1,0]] structure on R^n, n even.
RealMatrix standard_unitary_structure(Eigen::Index n);

/// J_xi for a real skew xi without zero eigenvalue: +i on the eigenspaces of
/// xi with eigenvalue i s, s > 0, and -i on their conjugates.
RealMatrix unitary_structure(const SkewMatrix& xi);

struct Log0Decomposition {
  SkewMatrix xi;  ///< exp(xi) = g
  RealMatrix J;   ///< J_xi, extended by the canonical structure on the -1 eigenspace
};

/// Writes log_0(-g) = xi - pi J_xi for g in SO(n) without eigenvalue 1.
Log0Decomposition log0_decompose(const RealMatrix& g);

/// Orthonormal basis of the range of an orthogonal projector, built by
/// pivoted Gram-Schmidt on its columns.  Depends only on the subspace.
RealMatrix subspace_basis(const RealMatrix& projector, Eigen::Index rank);

/// Real orthonormal basis of the -1 eigenspace of an orthogonal matrix, taken
/// from subspace_basis.  Columns (b1, b2), (b3, b4), ... are paired by the
/// canonical structure b1 -> b2 -> -b1.
RealMatrix minus_one_eigenspace(const RealMatrix& g);

}  // namespace polyloop
