#pragma once

// Quasi-periodic paths alpha with alpha(t+1) alpha(t)^{-1} constant, written as
// g * exp(t xi_1) ... exp(t xi_m) * gamma(t) * g'^{-1}, and explicit local
// sections of the projection alpha -> alpha(1) alpha(0)^{-1} for U(n), SU(n)
// and SO(n).

#include <optional>
#include <string>
#include <vector>

#include "polyloop/spectral.hpp"

namespace polyloop {

class PathElement {
 public:
  PathElement(Group group, std::vector<SkewMatrix> factors, std::optional<MatrixLoop> loop = std::nullopt);
  static PathElement identity(Group group, Eigen::Index n);
  static PathElement eta(Group group, const SkewMatrix& xi);

  Group group() const { return group_; }
  Eigen::Index dim() const { return dim_; }
  const std::vector<SkewMatrix>& factors() const { return factors_; }
  const std::optional<MatrixLoop>& loop() const { return loop_; }
  const Matrix& left() const { return left_; }
  const Matrix& right() const { return right_; }

  /// g * alpha.
  PathElement left_multiplied(const Matrix& g) const;
  /// g * alpha * g^{-1}.
  PathElement conjugated(const Matrix& g) const;

  /// Largest spectral radius over the exponential factors.
  double max_spectral_radius() const;

 private:
  Group group_;
  Eigen::Index dim_;
  std::vector<SkewMatrix> factors_;
  std::optional<MatrixLoop> loop_;
  Matrix left_;
  Matrix right_;
};

Matrix eval_path(const PathElement& p, double t);
/// alpha(1) alpha(0)^{-1}.
Matrix project_path(const PathElement& p);
/// max over t_i = i/samples of ||alpha(t+1) alpha(t)^{-1} - alpha(1) alpha(0)^{-1}||.
double periodicity_defect(const PathElement& p, int samples = 32);

/// Certification degree for a product of exponential factors:
/// ceil(max spectral radius / 2 pi) + 4, plus the degree of any loop part.
int certificate_degree(const std::vector<double>& radii, int loop_degree = 0);

struct SectionCheck {
  double endpoint_err;   ///< ||project_path - target||
  double group_residual; ///< max over the sample grid
  double det_deviation;  ///< max |det alpha(t) - 1| over the grid
  double poly_residual;  ///< polynomiality of t -> exp(-t zeta) alpha(t), zeta = central_log(target)
  double periodicity;
  int degree;
};

/// Verifies a section value against its target fibre point on a grid of
/// `grid` samples.
SectionCheck check_section(const PathElement& p, const Matrix& target, int grid = kDefaultGrid);

/// exp(t log_s g), s = i * centre.
PathElement un_section(double centre, const Matrix& g);

/// Factors [log_s g, -(tr log_s g) v v^*]: the second factor cancels the
/// determinant of the first and has exponential 1.
PathElement su_section(double centre, const Matrix& g, const Vector& v);

struct SpectralSplit {
  RealMatrix low;        ///< projector onto eigenvalues with real part < r
  RealMatrix high;       ///< projector onto eigenvalues with real part > r
  RealMatrix low_basis;  ///< subspace_basis(low)
};

/// Rejects r outside [-1, 1] and eigenvalues within 1e-8 of real part r.
SpectralSplit so_spectral_split(const RealMatrix& h, double r);

struct SoSectionData {
  PathElement path;
  RealMatrix J_h;      ///< unitary structure on the low block of h, zero on the high block
  RealMatrix epsilon;  ///< h exp(-pi J_h)
  double condition;    ///< of the projection from low(g) to low(h)
};

/// Section over the neighbourhood of g where the projection of the low block
/// of g onto the low block of h is an isomorphism.  The canonical structure
/// on low(g) is carried to low(h) by projection and polar orthogonalisation.
SoSectionData so_section_data(double r, const RealMatrix& g, const RealMatrix& h);
inline PathElement so_section(double r, const RealMatrix& g, const RealMatrix& h) {
  return so_section_data(r, g, h).path;
}

/// Fourier projection of t -> a(t)^{-1} b(t); rejects paths over different points.
PairLoop path_fiber_quotient(const PathElement& a, const PathElement& b, int grid = kDefaultGrid);

/// Smooth step rho: [0, 1/2] -> [0, 1/2], constant within `flat` of each end.
double smooth_step(double t, double flat = 0.05);

/// Section of the smooth quasi-periodic path space near g:
///   alpha(t) = exp(2 rho(t) xi)                     on [0, 1/2]
///   alpha(t) = g exp(2 rho(t - 1/2) log_0(g^{-1} h)) on [1/2, 1]
/// with exp(xi) = g and xi in the Lie algebra, extended by
/// alpha(t + n) = h^n alpha(t).
class SmoothSection {
 public:
  /// Rejects h when g^{-1} h has an eigenvalue within 1e-8 of -1 (outside the chart).
  SmoothSection(Group group, const Matrix& g, const Matrix& h);

  Matrix operator()(double t) const;
  /// Values at t_i = i / grid, i = 0..grid.
  std::vector<Matrix> sample(int grid = kDefaultGrid) const;

  const SkewMatrix& xi() const { return xi_; }
  const SkewMatrix& chart() const { return chart_; }

 private:
  Matrix g_;
  Matrix h_;
  SkewMatrix xi_;
  SkewMatrix chart_;
};

/// Lie-algebra logarithm of g inside the given group: central_log for U(n),
/// trace-corrected central_log for SU(n), and a real logarithm for SO(n).
SkewMatrix group_log(Group group, const Matrix& g);

struct JunctionMismatch {
  double middle;  ///< one-sided derivative difference at t = 1/2
  double seam;    ///< one-sided derivative difference at t = 1
};

JunctionMismatch junction_mismatch(const SmoothSection& s, double step = 1e-4);

struct SweepReport {
  Group group;
  Eigen::Index dim;
  int trials = 0;
  int rejections = 0;
  double max_endpoint_err = 0.0;
  double max_poly_residual = 0.0;
  double max_group_residual = 0.0;
  double max_det_deviation = 0.0;
  std::vector<std::string> failures;
};

void to_json(nlohmann::json& j, const SweepReport& r);

}  // namespace polyloop
