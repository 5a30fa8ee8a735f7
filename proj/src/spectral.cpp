#include "polyloop/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "polyloop/errors.hpp"

namespace polyloop {

namespace {

void require_unitary(const Matrix& g, const char* who) {
  if (g.rows() != g.cols() || g.rows() == 0) throw RejectedInput(std::string(who) + ": matrix is not square");
  const double res = (g.adjoint() * g - Matrix::Identity(g.rows(), g.cols())).norm();
  if (res > 1e-8) throw RejectedInput(std::string(who) + ": matrix is not unitary (residual " + std::to_string(res) + ")");
}

Matrix from_spectrum(const Matrix& u, const Vector& d) { return u * d.asDiagonal() * u.adjoint(); }

}  // namespace

std::vector<std::vector<Eigen::Index>> EigenDecomp::clusters(double tol) const {
  const auto n = eigenvalues.size();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(eigenvalues(i) - eigenvalues(j)) < tol) parent[find(j)] = find(i);
  std::vector<std::vector<Eigen::Index>> out;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(out.size());
      out.emplace_back();
    }
    out[slot[root]].push_back(i);
  }
  return out;
}

Matrix EigenDecomp::projector(const std::vector<Eigen::Index>& cluster) const {
  Matrix p = Matrix::Zero(vectors.rows(), vectors.rows());
  for (auto i : cluster) p.noalias() += vectors.col(i) * vectors.col(i).adjoint();
  return p;
}

Matrix EigenDecomp::reconstruct() const { return from_spectrum(vectors, eigenvalues); }

EigenDecomp normal_eigen(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) throw RejectedInput("normal_eigen: matrix is not square");
  Eigen::ComplexSchur<Matrix> schur(g);
  if (schur.info() != Eigen::Success) throw ConvergenceError("normal_eigen: Schur iteration failed");
  const Matrix& t = schur.matrixT();
  const double off = t.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm();
  if (off > 1e-8 * std::max(1.0, g.norm()))
    throw RejectedInput("normal_eigen: matrix is not normal (Schur off-diagonal " + std::to_string(off) + ")");
  return {t.diagonal(), schur.matrixU()};
}

SkewMatrix::SkewMatrix(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) throw RejectedInput("SkewMatrix: matrix is not square");
  if (!m.allFinite()) throw RejectedInput("SkewMatrix: non-finite entry");
  const double defect = (m + m.adjoint()).norm();
  if (defect > tol * std::max(1.0, m.norm()))
    throw RejectedInput("SkewMatrix: not skew-Hermitian (defect " + std::to_string(defect) + ")");
  m_ = 0.5 * (m - m.adjoint());
  decompose();
}

SkewMatrix::SkewMatrix(Matrix m, bool real, int) : m_(std::move(m)), real_(real) { decompose(); }

SkewMatrix SkewMatrix::real(const RealMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) throw RejectedInput("SkewMatrix: matrix is not square");
  if (!m.allFinite()) throw RejectedInput("SkewMatrix: non-finite entry");
  const double defect = (m + m.transpose()).norm();
  if (defect > tol * std::max(1.0, m.norm()))
    throw RejectedInput("SkewMatrix: not skew-symmetric (defect " + std::to_string(defect) + ")");
  const RealMatrix skew = 0.5 * (m - m.transpose());
  return SkewMatrix(Matrix(skew.cast<cplx>()), true, 0);
}

void SkewMatrix::decompose() {
  const Matrix h = cplx(0.0, -1.0) * m_;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw ConvergenceError("SkewMatrix: eigensolver failed");
  mu_ = es.eigenvalues();
  u_ = es.eigenvectors();
}

double SkewMatrix::spectral_radius() const { return mu_.cwiseAbs().maxCoeff(); }

Matrix SkewMatrix::exp(double t) const {
  Vector d(mu_.size());
  for (Eigen::Index j = 0; j < mu_.size(); ++j) d(j) = std::polar(1.0, mu_(j) * t);
  Matrix e = from_spectrum(u_, d);
  if (real_) e = e.real().cast<cplx>();
  return e;
}

SkewMatrix SkewMatrix::operator*(double c) const { return SkewMatrix(Matrix(m_ * c), real_, 0); }

SkewMatrix SkewMatrix::operator+(const SkewMatrix& o) const {
  if (o.dim() != dim()) throw RejectedInput("SkewMatrix: dimension mismatch");
  return SkewMatrix(Matrix(m_ + o.m_), real_ && o.real_, 0);
}

SkewMatrix SkewMatrix::operator-(const SkewMatrix& o) const { return *this + o * -1.0; }

SkewMatrix realify(const SkewMatrix& xi, double tol) {
  if (xi.is_real()) return xi;
  const double im = xi.matrix().imag().norm();
  if (im > tol * std::max(1.0, xi.matrix().norm()))
    throw RejectedInput("realify: imaginary part " + std::to_string(im) + " is not negligible");
  return SkewMatrix::real(xi.matrix().real());
}

SkewMatrix log_branch(const Matrix& g, double centre) {
  require_unitary(g, "log_branch");
  const auto eig = normal_eigen(g);
  const cplx e = std::polar(1.0, centre);
  Vector d(eig.eigenvalues.size());
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    const cplx lambda = eig.eigenvalues(j);
    if (std::abs(lambda + e) < 1e-8)
      throw BranchCutError("log_branch: eigenvalue on the branch cut of the logarithm centred at " +
                               std::to_string(centre),
                           lambda);
    d(j) = cplx(0.0, centre + std::arg(lambda / e));
  }
  return SkewMatrix(from_spectrum(eig.vectors, d), 1e-8);
}

Matrix exp_skew(const SkewMatrix& xi) { return xi.exp(1.0); }

SkewMatrix central_log(const Matrix& g) {
  require_unitary(g, "central_log");
  const auto eig = normal_eigen(g);
  Vector d(eig.eigenvalues.size());
  for (const auto& cluster : eig.clusters()) {
    cplx mean = 0.0;
    for (auto i : cluster) mean += eig.eigenvalues(i);
    double theta = std::arg(mean);
    if (theta >= kPi - 1e-12) theta -= kTwoPi;
    for (auto i : cluster) d(i) = cplx(0.0, theta);
  }
  return SkewMatrix(from_spectrum(eig.vectors, d), 1e-8);
}

int pair_loop_degree(const SkewMatrix& xi1, const SkewMatrix& xi2) {
  return static_cast<int>(std::floor((xi1.spectral_radius() + xi2.spectral_radius()) / kTwoPi + 1e-6));
}

PairLoop eta_pair_loop(const SkewMatrix& xi1, const SkewMatrix& xi2, int degree, int grid) {
  if (xi1.dim() != xi2.dim()) throw RejectedInput("eta_pair_loop: dimension mismatch");
  const double gap = (xi1.exp() - xi2.exp()).norm();
  if (gap > 1e-9)
    throw RejectedInput("eta_pair_loop: exp(xi1) and exp(xi2) differ by " + std::to_string(gap));
  if (degree < 0) degree = pair_loop_degree(xi1, xi2);
  while (4 * degree >= grid) grid *= 2;
  const auto n = xi1.dim();
  const auto samples = SampledLoop::sample([&](double t) -> Matrix { return xi1.exp(-t) * xi2.exp(t); }, n, n, grid);
  const auto proj = fourier_project(samples, degree);
  const double residual = proj.total == 0.0 ? 0.0 : proj.residual / proj.total;
  const Field field = xi1.is_real() && xi2.is_real() ? Field::real : Field::complex;
  return {MatrixLoop::from_coeffs(proj.loop.coeffs(), field), residual, degree};
}

RealMatrix standard_unitary_structure(Eigen::Index n) {
  if (n <= 0 || n % 2 != 0) throw RejectedInput("standard_unitary_structure: dimension must be even and positive");
  RealMatrix j = RealMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; k += 2) {
    j(k + 1, k) = 1.0;
    j(k, k + 1) = -1.0;
  }
  return j;
}

RealMatrix unitary_structure(const SkewMatrix& xi) {
  const SkewMatrix x = realify(xi);
  if (x.dim() % 2 != 0) throw RejectedInput("unitary_structure: odd dimension forces a kernel");
  const auto& mu = x.frequencies();
  Vector d(mu.size());
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    if (std::abs(mu(j)) < 1e-8) throw RejectedInput("unitary_structure: xi has a kernel");
    d(j) = cplx(0.0, mu(j) > 0 ? 1.0 : -1.0);
  }
  const Matrix jc = from_spectrum(x.eigenvectors(), d);
  if (jc.imag().norm() > 1e-8) throw ConvergenceError("unitary_structure: J is not real");
  return jc.real();
}

RealMatrix subspace_basis(const RealMatrix& projector, Eigen::Index rank) {
  const auto n = projector.rows();
  RealMatrix basis(n, rank);
  std::vector<bool> used(static_cast<size_t>(n), false);
  for (Eigen::Index c = 0; c < rank; ++c) {
    RealMatrix cand = projector;
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index k = 0; k < c; ++k) cand -= basis.col(k) * (basis.col(k).transpose() * cand);
    const Eigen::VectorXd norms = cand.colwise().norm();
    const double best = norms.maxCoeff();
    if (!(best > 1e-6)) throw ConvergenceError("subspace_basis: projector rank is lower than requested");
    Eigen::Index pick = 0;
    while (used[pick] || norms(pick) < 0.5 * best) ++pick;
    used[pick] = true;
    basis.col(c) = cand.col(pick) / norms(pick);
  }
  return basis;
}

RealMatrix minus_one_eigenspace(const RealMatrix& g) {
  const auto n = g.rows();
  Eigen::JacobiSVD<RealMatrix> svd(g + RealMatrix::Identity(n, n), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index m = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) < kClusterTol) ++m;
  if (m == 0) return RealMatrix(n, 0);
  const RealMatrix v = svd.matrixV().rightCols(m);
  return subspace_basis(v * v.transpose(), m);
}

Log0Decomposition log0_decompose(const RealMatrix& g) {
  const auto n = g.rows();
  if (n != g.cols() || n == 0) throw RejectedInput("log0_decompose: matrix is not square");
  const double res = matrix_group_residual(g.cast<cplx>(), Group::SO);
  if (res > 1e-8) throw RejectedInput("log0_decompose: matrix is not in SO(n) (residual " + std::to_string(res) + ")");
  if (n % 2 != 0) throw RejectedInput("log0_decompose: odd-dimensional rotations have eigenvalue 1");
  const auto eig = normal_eigen(g.cast<cplx>());
  for (Eigen::Index j = 0; j < eig.eigenvalues.size(); ++j)
    if (std::abs(eig.eigenvalues(j) - 1.0) < 1e-8) throw RejectedInput("log0_decompose: g has eigenvalue 1");

  const SkewMatrix l = realify(log_branch(-g.cast<cplx>(), 0.0));

  // J on the complement of the -1 eigenspace, zero on it.
  const auto& mu = l.frequencies();
  Vector d(mu.size());
  for (Eigen::Index j = 0; j < mu.size(); ++j)
    d(j) = std::abs(mu(j)) < kClusterTol ? cplx(0.0) : cplx(0.0, mu(j) > 0 ? 1.0 : -1.0);
  const RealMatrix j_perp = from_spectrum(l.eigenvectors(), d).real();

  const RealMatrix f = minus_one_eigenspace(g);
  if (f.cols() % 2 != 0) throw ConvergenceError("log0_decompose: -1 eigenspace has odd dimension");
  RealMatrix j_f = RealMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < f.cols(); k += 2)
    j_f += f.col(k + 1) * f.col(k).transpose() - f.col(k) * f.col(k + 1).transpose();

  const RealMatrix xi = l.real_matrix() - kPi * j_perp + kPi * j_f;
  return {SkewMatrix::real(xi, 1e-8), j_f - j_perp};
}

}  // namespace polyloop
