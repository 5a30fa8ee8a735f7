#pragma once

// Parallel transport along loops in three model manifolds, the holonomy,
// Floquet data of the covariant derivative along the loop, its eigen-sections,
// and the cosh-weighted inner product on their span.
//
// Frames are transported by Phi' = A(t) Phi, Phi(0) = I, so the covariant
// derivative in frame coordinates is D = d/dt - A(t) and Phi(t + 1) = Phi(t) g
// with holonomy g = Phi(1).  D_hat = D / 2 pi has eigen-sections
//   phi_{p,j}(t) = e^{2 pi i p t} Phi(t) e^{-2 pi i s_j t} w_j
// with eigenvalue i (p - s_j), where g w_j = e^{2 pi i s_j} w_j.

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "polyloop/laurent.hpp"

namespace polyloop {

enum class ModelKind { torus, sphere, su2, torus_sphere };

const char* to_string(ModelKind m);
ModelKind parse_model(const std::string& name);

/// Closed-form loop parameters.  The sphere loop is
///   theta(t) = theta + theta_amp sin(2 pi t + theta_phase)
///   phi(t)   = 2 pi winding t + phi_amp sin(2 pi phi_freq t);
/// the SU(2) loop is exp(2 pi winding t i (axis . sigma)); the torus loop winds
/// torus_winding times around each factor.
struct BaseLoop {
  double theta = kPi / 3.0;
  double theta_amp = 0.0;
  double theta_phase = 0.0;
  int winding = 1;
  double phi_amp = 0.0;
  int phi_freq = 1;
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  std::array<int, 2> torus_winding{1, 0};

  static BaseLoop latitude(double theta, int winding = 1);
};

nlohmann::json loop_params_json(ModelKind model, const BaseLoop& loop);

/// sigma(t) = orientation t + shift + amplitude sin(2 pi t).  Monotone iff
/// 2 pi |amplitude| < 1.
struct Reparam {
  int orientation = 1;
  double shift = 0.0;
  double amplitude = 0.0;

  double operator()(double t) const;
  double derivative(double t) const;
  bool is_rigid() const { return amplitude == 0.0; }
  /// Rejects orientation other than +-1 and non-monotone sigma.
  void validate() const;
};

class ConnectionModel {
 public:
  explicit ConnectionModel(ModelKind kind, double radius = 1.0);

  ModelKind kind() const { return kind_; }
  double radius() const { return radius_; }
  /// Rank of the frame bundle: 2 (torus, sphere), 3 (SU(2)), 4 (torus + sphere).
  Eigen::Index rank() const;

  /// Levi-Civita coefficient A(t) along loop o sigma, in the model's
  /// orthonormal frame: sigma'(t) A(sigma(t)).
  RealMatrix connection(const BaseLoop& loop, double t, const Reparam& sigma = {}) const;

 private:
  ModelKind kind_;
  double radius_;
};

inline constexpr int kDefaultSteps = 4096;

struct TransportResult {
  Matrix value;
  /// ||Phi_{steps} - Phi_{2 steps}||
  double doubling_error;
};

/// Fourth-order Runge-Kutta solution of Phi' = A Phi from t0 to t1 with
/// `steps` uniform steps, checked against `2 steps`.  Throws ConvergenceError
/// when the two differ by more than 1e-6.
TransportResult transport(const ConnectionModel& model, const BaseLoop& loop, double t0, double t1,
                          int steps = kDefaultSteps, const Reparam& sigma = {});
TransportResult holonomy(const ConnectionModel& model, const BaseLoop& loop, int steps = kDefaultSteps,
                         const Reparam& sigma = {});

struct MonodromyData {
  Matrix holonomy;
  std::vector<double> exponents;  ///< s_j in [-1/2, 1/2)
  Matrix frame;                   ///< columns w_j
  std::vector<Matrix> transported;  ///< Phi(i / grid), i = 0..grid
  double doubling_error = 0.0;

  int grid() const { return static_cast<int>(transported.size()) - 1; }
};

/// Floquet exponents and eigenframe of a unitary holonomy.  Eigenvalues within
/// 1e-7 share the cluster-mean exponent; exponents within 1e-9 of 1/2 are
/// taken as -1/2.
MonodromyData floquet(const Matrix& g);

/// Transported frame on the grid plus Floquet data of its endpoint.
MonodromyData monodromy(const ConnectionModel& model, const BaseLoop& loop, int grid = kDefaultGrid,
                        int steps = kDefaultSteps, const Reparam& sigma = {});

/// Sampled sections: n x grid matrices, column i holding the value at i / grid.
using SampledSection = Matrix;

struct FiberBasis {
  int bound = 0;
  Eigen::Index dim = 0;
  std::vector<double> exponents;
  std::vector<std::pair<int, Eigen::Index>> labels;  ///< (p, j)
  std::vector<SampledSection> sections;
  /// max ||phi(1) - phi(0)|| over the basis
  double periodicity_error = 0.0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(sections.size()); }
  Eigen::Index index(int p, Eigen::Index j) const { return (p + bound) * dim + j; }
};

/// Eigen-sections phi_{p,j} for |p| <= bound.  Throws ConvergenceError when a
/// section fails periodicity by more than 1e-8.
FiberBasis eigen_sections(const MonodromyData& data, int bound);

/// L^2(S^1) inner product sum_i a(t_i)^* b(t_i) / grid.
cplx l2_pairing(const SampledSection& a, const SampledSection& b);
Matrix gram_matrix(const FiberBasis& basis);
double gram_error(const FiberBasis& basis);

/// max over the basis of ||D_hat phi - i (p - s_j) phi|| / ||phi|| with
/// eighth-order periodic finite differences on the grid.
double d_hat_residual(const ConnectionModel& model, const BaseLoop& loop, const FiberBasis& basis,
                      const Reparam& sigma = {});

struct FiberSection {
  int bound = 0;
  Matrix coeffs;  ///< (2P+1) x n, entry (p + P, j) = c_{p,j}
  double residual = 0.0;  ///< ||alpha - sum c phi|| / ||alpha||

  cplx coeff(int p, Eigen::Index j) const { return coeffs(p + bound, j); }
};

FiberSection project_section(const SampledSection& alpha, const FiberBasis& basis);
SampledSection reconstruct(const FiberSection& s, const FiberBasis& basis);

/// sum cosh((p - s_j) ln r)^2 conj(a_{p,j}) b_{p,j}.  Rejects r <= 1.
cplx cos_inner_product(const FiberSection& a, const FiberSection& b, const std::vector<double>& exponents, double r);
/// Matrix of cos_inner_product over the basis vectors themselves.
Matrix cos_gram(const FiberBasis& basis, double r);

using SectionFunction = std::function<Vector(double)>;

/// ||D_{gamma o sigma}(alpha o sigma) - ((D_gamma alpha) o sigma) sigma'|| / ||alpha||,
/// maxima over the grid, both sides by eighth-order finite differences.
/// Rejects sigma that is not orientation preserving and monotone.
double condiff_residual(const ConnectionModel& model, const BaseLoop& loop, const Reparam& sigma,
                        const SectionFunction& alpha, int grid = kDefaultGrid);

struct ReparamReport {
  /// max over the basis of the polynomiality residual of phi o sigma in the
  /// Floquet coordinates over gamma o sigma, at degree |p| + 1
  double standard_residual = 0.0;
  /// max ||alpha(1) - alpha(0)|| for sections rebuilt over gamma o sigma from
  /// unchanged coefficients
  double transport_periodicity = 0.0;
  /// max |c - c'| after re-projecting the rebuilt sections
  double coefficient_drift = 0.0;
};

ReparamReport reparam_actions(const ConnectionModel& model, const BaseLoop& loop, const Reparam& sigma, int bound,
                              int grid = kDefaultGrid, int steps = kDefaultSteps);

struct CounterexampleReport {
  double residual;
  int degree;
  int winding;
};

/// Polynomiality of t -> exp(2 pi i gamma(t)) beta(t) at degree
/// deg(beta) + |winding of gamma| + 4.
CounterexampleReport subbundle_counterexample(const std::function<double(double)>& gamma, const MatrixLoop& beta,
                                              int grid = kDefaultGrid);

/// Eighth-order central difference weights for offsets 1..4.
inline constexpr std::array<double, 4> kCentralWeights{4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};

}  // namespace polyloop
