#include "polyloop/path_sections.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "polyloop/errors.hpp"

namespace polyloop {

namespace {

void require_group(const Matrix& g, Group group, const char* who) {
  const double res = matrix_group_residual(g, group);
  if (res > 1e-8)
    throw RejectedInput(std::string(who) + ": matrix is not in " + to_string(group) + " (residual " +
                        std::to_string(res) + ")");
}

// Logarithm of a real special orthogonal matrix read off its real Schur form:
// 2x2 rotation blocks contribute their angle, and the -1 entries, which come
// in pairs, are paired into rotations by pi.
SkewMatrix real_log(const RealMatrix& g) {
  const auto n = g.rows();
  Eigen::RealSchur<RealMatrix> schur(g);
  if (schur.info() != Eigen::Success) throw ConvergenceError("real_log: Schur iteration failed");
  const RealMatrix& t = schur.matrixT();
  RealMatrix l = RealMatrix::Zero(n, n);
  std::vector<Eigen::Index> minus_one;
  for (Eigen::Index i = 0; i < n;) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      const double theta = std::atan2(0.5 * (t(i + 1, i) - t(i, i + 1)), 0.5 * (t(i, i) + t(i + 1, i + 1)));
      l(i + 1, i) = theta;
      l(i, i + 1) = -theta;
      i += 2;
    } else {
      if (t(i, i) < 0) minus_one.push_back(i);
      ++i;
    }
  }
  if (minus_one.size() % 2 != 0) throw RejectedInput("real_log: determinant is not 1");
  for (size_t k = 0; k < minus_one.size(); k += 2) {
    l(minus_one[k + 1], minus_one[k]) = kPi;
    l(minus_one[k], minus_one[k + 1]) = -kPi;
  }
  const RealMatrix& q = schur.matrixU();
  return SkewMatrix::real(q * l * q.transpose(), 1e-8);
}

Matrix matrix_power(const Matrix& h, long n) {
  const Matrix base = n >= 0 ? h : Matrix(h.adjoint());
  Matrix out = Matrix::Identity(h.rows(), h.cols());
  for (long k = 0; k < std::abs(n); ++k) out = base * out;
  return out;
}

}  // namespace

PathElement::PathElement(Group group, std::vector<SkewMatrix> factors, std::optional<MatrixLoop> loop)
    : group_(group), factors_(std::move(factors)), loop_(std::move(loop)) {
  if (factors_.empty() && !loop_) throw RejectedInput("PathElement: needs a factor or a loop part");
  dim_ = factors_.empty() ? loop_->dim() : factors_.front().dim();
  for (const auto& f : factors_)
    if (f.dim() != dim_) throw RejectedInput("PathElement: factor dimension mismatch");
  if (loop_ && (!loop_->is_square() || loop_->dim() != dim_))
    throw RejectedInput("PathElement: loop part dimension mismatch");
  left_ = right_ = Matrix::Identity(dim_, dim_);
}

PathElement PathElement::identity(Group group, Eigen::Index n) { return PathElement(group, {SkewMatrix::zero(n)}); }

PathElement PathElement::eta(Group group, const SkewMatrix& xi) { return PathElement(group, {xi}); }

PathElement PathElement::left_multiplied(const Matrix& g) const {
  if (g.rows() != dim_ || g.cols() != dim_) throw RejectedInput("PathElement: dimension mismatch");
  PathElement out = *this;
  out.left_ = g * left_;
  return out;
}

PathElement PathElement::conjugated(const Matrix& g) const {
  if (g.rows() != dim_ || g.cols() != dim_) throw RejectedInput("PathElement: dimension mismatch");
  PathElement out = *this;
  out.left_ = g * left_;
  out.right_ = right_ * g.inverse();
  return out;
}

double PathElement::max_spectral_radius() const {
  double r = 0.0;
  for (const auto& f : factors_) r = std::max(r, f.spectral_radius());
  return r;
}

Matrix eval_path(const PathElement& p, double t) {
  Matrix out = p.left();
  for (const auto& f : p.factors()) out = out * f.exp(t);
  if (p.loop()) out = out * laurent_eval(*p.loop(), t);
  return out * p.right();
}

Matrix project_path(const PathElement& p) { return eval_path(p, 1.0) * eval_path(p, 0.0).inverse(); }

double periodicity_defect(const PathElement& p, int samples) {
  const Matrix c = project_path(p);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    const Matrix d = eval_path(p, t + 1.0) * eval_path(p, t).inverse();
    worst = std::max(worst, (d - c).norm());
  }
  return worst;
}

int certificate_degree(const std::vector<double>& radii, int loop_degree) {
  double r = 0.0;
  for (double x : radii) r = std::max(r, x);
  return static_cast<int>(std::ceil(r / kTwoPi - 1e-9)) + 4 + loop_degree;
}

SectionCheck check_section(const PathElement& p, const Matrix& target, int grid) {
  SectionCheck out{};
  out.endpoint_err = (project_path(p) - target).norm();
  const SkewMatrix zeta = central_log(target);
  std::vector<double> radii{zeta.spectral_radius()};
  for (const auto& f : p.factors()) radii.push_back(f.spectral_radius());
  out.degree = certificate_degree(radii, p.loop() ? p.loop()->degree() : 0);
  while (4 * out.degree >= grid) grid *= 2;

  std::vector<Matrix> values;
  values.reserve(grid);
  for (int i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / grid;
    const Matrix a = eval_path(p, t);
    out.group_residual = std::max(out.group_residual, matrix_group_residual(a, p.group()));
    out.det_deviation = std::max(out.det_deviation, std::abs(a.determinant() - 1.0));
    values.push_back(zeta.exp(-t) * a);
  }
  out.poly_residual = polynomiality_residual(SampledLoop(p.dim(), p.dim(), std::move(values)), out.degree);
  out.periodicity = periodicity_defect(p);
  return out;
}

PathElement un_section(double centre, const Matrix& g) {
  require_group(g, Group::U, "un_section");
  return PathElement::eta(Group::U, log_branch(g, centre));
}

PathElement su_section(double centre, const Matrix& g, const Vector& v) {
  require_group(g, Group::SU, "su_section");
  if (v.size() != g.rows()) throw RejectedInput("su_section: vector dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-10) throw RejectedInput("su_section: v is not a unit vector");
  const SkewMatrix l = log_branch(g, centre);
  const cplx tr = l.matrix().trace();
  const SkewMatrix twist(Matrix(-tr * (v * v.adjoint())), 1e-8);
  return PathElement(Group::SU, {l, twist});
}

SpectralSplit so_spectral_split(const RealMatrix& h, double r) {
  if (!(r >= -1.0 && r <= 1.0)) throw RejectedInput("so_spectral_split: r must lie in [-1, 1]");
  require_group(h.cast<cplx>(), Group::SO, "so_spectral_split");
  const auto n = h.rows();
  const RealMatrix s = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(s);
  const auto& re = es.eigenvalues();
  Eigen::Index m = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(re(i) - r) <= 1e-8)
      throw RejectedInput("so_spectral_split: eigenvalue with real part " + std::to_string(re(i)) + " at r");
    if (re(i) < r) ++m;
  }
  if (m % 2 != 0) throw ConvergenceError("so_spectral_split: low block has odd rank");
  const RealMatrix v = es.eigenvectors().leftCols(m);
  SpectralSplit out;
  out.low = v * v.transpose();
  out.high = RealMatrix::Identity(n, n) - out.low;
  out.low_basis = subspace_basis(out.low, m);
  return out;
}

SoSectionData so_section_data(double r, const RealMatrix& g, const RealMatrix& h) {
  if (g.rows() != h.rows()) throw RejectedInput("so_section: dimension mismatch");
  const auto n = h.rows();
  const auto split_g = so_spectral_split(g, r);
  const auto split_h = so_spectral_split(h, r);
  const auto m = split_g.low_basis.cols();
  if (split_h.low_basis.cols() != m) throw RejectedInput("so_section: h is outside the neighbourhood of g (rank change)");

  RealMatrix j_h = RealMatrix::Zero(n, n);
  RealMatrix low_h = RealMatrix::Zero(n, n);
  double condition = 1.0;
  if (m > 0) {
    const RealMatrix proj = split_h.low * split_g.low_basis;
    Eigen::JacobiSVD<RealMatrix> svd(proj, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    condition = sv(m - 1) > 0.0 ? sv(0) / sv(m - 1) : INFINITY;
    if (!(condition < 1e6))
      throw RejectedInput("so_section: projection between low blocks is not an isomorphism (condition " +
                          std::to_string(condition) + ")");
    const RealMatrix b_h = svd.matrixU() * svd.matrixV().transpose();
    j_h = b_h * standard_unitary_structure(m) * b_h.transpose();
    low_h = b_h * b_h.transpose();
  }
  // exp(-pi J_h) is -1 on the low block and 1 on the high block.
  const RealMatrix epsilon = h * (RealMatrix::Identity(n, n) - 2.0 * low_h);
  const auto eig = normal_eigen(epsilon.cast<cplx>());
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(eig.eigenvalues(i) + 1.0) < 1e-8) throw RejectedInput("so_section: epsilon(h) has eigenvalue -1");
  const SkewMatrix a = realify(log_branch(epsilon.cast<cplx>(), 0.0));
  const SkewMatrix b = SkewMatrix::real(kPi * j_h, 1e-8);
  return {PathElement(Group::SO, {a, b}), j_h, epsilon, condition};
}

PairLoop path_fiber_quotient(const PathElement& a, const PathElement& b, int grid) {
  if (a.dim() != b.dim()) throw RejectedInput("path_fiber_quotient: dimension mismatch");
  const double gap = (project_path(a) - project_path(b)).norm();
  if (gap > 1e-9) throw RejectedInput("path_fiber_quotient: paths lie over different points (gap " + std::to_string(gap) + ")");
  std::vector<double> radii;
  for (const auto& f : a.factors()) radii.push_back(f.spectral_radius());
  for (const auto& f : b.factors()) radii.push_back(f.spectral_radius());
  const int degree = certificate_degree(radii, (a.loop() ? a.loop()->degree() : 0) + (b.loop() ? b.loop()->degree() : 0));
  while (4 * degree >= grid) grid *= 2;
  const auto n = a.dim();
  const auto samples = SampledLoop::sample(
      [&](double t) -> Matrix { return eval_path(a, t).inverse() * eval_path(b, t); }, n, n, grid);
  const auto proj = fourier_project(samples, degree);
  return {proj.loop, proj.total == 0.0 ? 0.0 : proj.residual / proj.total, degree};
}

double smooth_step(double t, double flat) {
  const double x = (t - flat) / (0.5 - 2.0 * flat);
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 0.5;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return 0.5 * a / (a + b);
}

SkewMatrix group_log(Group group, const Matrix& g) {
  require_group(g, group, "group_log");
  switch (group) {
    case Group::U: return central_log(g);
    case Group::SU: {
      SkewMatrix l = central_log(g);
      const double k = std::round(l.matrix().trace().imag() / kTwoPi);
      if (k == 0.0) return l;
      const Vector u = l.eigenvectors().col(0);
      return l - SkewMatrix(Matrix(cplx(0.0, kTwoPi * k) * (u * u.adjoint())));
    }
    case Group::SO: return real_log(g.real());
  }
  throw RejectedInput("group_log: unknown group");
}

SmoothSection::SmoothSection(Group group, const Matrix& g, const Matrix& h)
    : g_(g), h_(h), xi_(group_log(group, g)), chart_(SkewMatrix::zero(g.rows())) {
  require_group(h, group, "smooth_section");
  if (h.rows() != g.rows()) throw RejectedInput("smooth_section: dimension mismatch");
  const Matrix rel = g.adjoint() * h;
  try {
    chart_ = log_branch(rel, 0.0);
  } catch (const BranchCutError& e) {
    throw RejectedInput("smooth_section: h lies outside the exponential chart at g");
  }
  if (group == Group::SO) chart_ = realify(chart_);
  if (group == Group::SU && std::abs(chart_.matrix().trace()) > 1e-8)
    throw RejectedInput("smooth_section: h lies outside the exponential chart at g (trace)");
}

Matrix SmoothSection::operator()(double t) const {
  const double n = std::floor(t);
  const double tau = t - n;
  const Matrix base = tau < 0.5 ? xi_.exp(2.0 * smooth_step(tau)) : Matrix(g_ * chart_.exp(2.0 * smooth_step(tau - 0.5)));
  if (n == 0.0) return base;
  return matrix_power(h_, static_cast<long>(n)) * base;
}

std::vector<Matrix> SmoothSection::sample(int grid) const {
  std::vector<Matrix> out;
  out.reserve(grid + 1);
  for (int i = 0; i < grid; ++i) out.push_back((*this)(static_cast<double>(i) / grid));
  out.push_back((*this)(1.0));
  return out;
}

JunctionMismatch junction_mismatch(const SmoothSection& s, double step) {
  auto mismatch = [&](double t) {
    const Matrix fwd = (s(t + step) - s(t)) / step;
    const Matrix bwd = (s(t) - s(t - step)) / step;
    return (fwd - bwd).norm();
  };
  return {mismatch(0.5), mismatch(1.0)};
}

void to_json(nlohmann::json& j, const SweepReport& r) {
  j = {{"group", to_string(r.group)},
       {"dim", r.dim},
       {"trials", r.trials},
       {"rejections", r.rejections},
       {"max_endpoint_err", r.max_endpoint_err},
       {"max_poly_residual", r.max_poly_residual},
       {"max_group_residual", r.max_group_residual},
       {"max_det_deviation", r.max_det_deviation},
       {"failures", r.failures}};
}

}  // namespace polyloop
