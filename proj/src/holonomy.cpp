#include "polyloop/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "polyloop/errors.hpp"
#include "polyloop/spectral.hpp"

namespace polyloop {

namespace {

RealMatrix j0() {
  RealMatrix j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

RealMatrix sphere_connection(const BaseLoop& loop, double t) {
  const double theta = loop.theta + loop.theta_amp * std::sin(kTwoPi * t + loop.theta_phase);
  const double dphi = kTwoPi * loop.winding + kTwoPi * loop.phi_freq * loop.phi_amp * std::cos(kTwoPi * loop.phi_freq * t);
  return -dphi * std::cos(theta) * j0();
}

RealMatrix su2_connection(const BaseLoop& loop) {
  const double norm = std::sqrt(loop.axis[0] * loop.axis[0] + loop.axis[1] * loop.axis[1] + loop.axis[2] * loop.axis[2]);
  const double c = kTwoPi * loop.winding / norm;
  const double u1 = loop.axis[0], u2 = loop.axis[1], u3 = loop.axis[2];
  RealMatrix a(3, 3);
  a << 0.0, -u3, u2, u3, 0.0, -u1, -u2, u1, 0.0;
  return c * a;
}

void validate_loop(ModelKind kind, const BaseLoop& loop) {
  if (kind == ModelKind::sphere || kind == ModelKind::torus_sphere) {
    const double lo = loop.theta - std::abs(loop.theta_amp);
    const double hi = loop.theta + std::abs(loop.theta_amp);
    if (!(lo > 1e-3 && hi < kPi - 1e-3)) throw RejectedInput("sphere loop must stay away from the poles");
  }
  if (kind == ModelKind::su2) {
    const double n2 = loop.axis[0] * loop.axis[0] + loop.axis[1] * loop.axis[1] + loop.axis[2] * loop.axis[2];
    if (!(n2 > 1e-24)) throw RejectedInput("SU(2) loop axis must be non-zero");
  }
}

// Classical RK4 for Phi' = A Phi from (t0, phi0) to t1.
RealMatrix rk4(const ConnectionModel& model, const BaseLoop& loop, const Reparam& sigma, RealMatrix phi, double t0,
               double t1, int steps) {
  const double h = (t1 - t0) / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const RealMatrix a0 = model.connection(loop, t, sigma);
    const RealMatrix am = model.connection(loop, t + 0.5 * h, sigma);
    const RealMatrix a1 = model.connection(loop, t + h, sigma);
    const RealMatrix k1 = a0 * phi;
    const RealMatrix k2 = am * (phi + 0.5 * h * k1);
    const RealMatrix k3 = am * (phi + 0.5 * h * k2);
    const RealMatrix k4 = a1 * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

void require_steps(int steps) {
  if (steps < 64) throw RejectedInput("transport: steps must be at least 64");
}

// Periodic eighth-order derivative of sampled columns.
Matrix periodic_derivative(const Matrix& f) {
  const auto n = f.cols();
  const double inv_h = static_cast<double>(n);
  Matrix d = Matrix::Zero(f.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int k = 1; k <= 4; ++k) d.col(i) += kCentralWeights[k - 1] * (f.col((i + k) % n) - f.col((i - k + n) % n));
  return d * inv_h;
}

Vector central_derivative(const SectionFunction& f, double t, double h) {
  Vector d = Vector::Zero(f(t).size());
  for (int k = 1; k <= 4; ++k) d += kCentralWeights[k - 1] * (f(t + k * h) - f(t - k * h));
  return d / h;
}

}  // namespace

const char* to_string(ModelKind m) {
  switch (m) {
    case ModelKind::torus: return "torus";
    case ModelKind::sphere: return "sphere";
    case ModelKind::su2: return "su2";
    case ModelKind::torus_sphere: return "torus+sphere";
  }
  return "?";
}

ModelKind parse_model(const std::string& name) {
  if (name == "torus" || name == "T2") return ModelKind::torus;
  if (name == "sphere" || name == "S2") return ModelKind::sphere;
  if (name == "su2" || name == "SU2") return ModelKind::su2;
  if (name == "torus+sphere") return ModelKind::torus_sphere;
  throw RejectedInput("unknown model '" + name + "' (expected torus, sphere, su2 or torus+sphere)");
}

BaseLoop BaseLoop::latitude(double theta, int winding) {
  BaseLoop l;
  l.theta = theta;
  l.winding = winding;
  return l;
}

nlohmann::json loop_params_json(ModelKind model, const BaseLoop& loop) {
  switch (model) {
    case ModelKind::torus: return {{"torus_winding", loop.torus_winding}};
    case ModelKind::su2: return {{"axis", loop.axis}, {"winding", loop.winding}};
    default:
      return {{"theta", loop.theta},         {"theta_amp", loop.theta_amp}, {"theta_phase", loop.theta_phase},
              {"winding", loop.winding},     {"phi_amp", loop.phi_amp},     {"phi_freq", loop.phi_freq}};
  }
}

double Reparam::operator()(double t) const { return orientation * t + shift + amplitude * std::sin(kTwoPi * t); }

double Reparam::derivative(double t) const { return orientation + kTwoPi * amplitude * std::cos(kTwoPi * t); }

void Reparam::validate() const {
  if (orientation != 1 && orientation != -1) throw RejectedInput("reparametrisation orientation must be +1 or -1");
  if (!(kTwoPi * std::abs(amplitude) < 1.0)) throw RejectedInput("reparametrisation is not monotone");
}

ConnectionModel::ConnectionModel(ModelKind kind, double radius) : kind_(kind), radius_(radius) {
  if (!(radius > 0.0)) throw RejectedInput("model radius must be positive");
}

Eigen::Index ConnectionModel::rank() const {
  switch (kind_) {
    case ModelKind::torus: return 2;
    case ModelKind::sphere: return 2;
    case ModelKind::su2: return 3;
    case ModelKind::torus_sphere: return 4;
  }
  return 0;
}

RealMatrix ConnectionModel::connection(const BaseLoop& loop, double t, const Reparam& sigma) const {
  const double s = sigma(t);
  const double ds = sigma.derivative(t);
  switch (kind_) {
    case ModelKind::torus: return RealMatrix::Zero(2, 2);
    case ModelKind::sphere: return ds * sphere_connection(loop, s);
    case ModelKind::su2: return ds * su2_connection(loop);
    case ModelKind::torus_sphere: {
      RealMatrix a = RealMatrix::Zero(4, 4);
      a.bottomRightCorner(2, 2) = ds * sphere_connection(loop, s);
      return a;
    }
  }
  return {};
}

TransportResult transport(const ConnectionModel& model, const BaseLoop& loop, double t0, double t1, int steps,
                          const Reparam& sigma) {
  require_steps(steps);
  validate_loop(model.kind(), loop);
  sigma.validate();
  const auto n = model.rank();
  const RealMatrix coarse = rk4(model, loop, sigma, RealMatrix::Identity(n, n), t0, t1, steps);
  const RealMatrix fine = rk4(model, loop, sigma, RealMatrix::Identity(n, n), t0, t1, 2 * steps);
  const double err = (coarse - fine).norm();
  if (err > 1e-6)
    throw ConvergenceError("transport: step doubling changed the result by " + std::to_string(err));
  return {fine.cast<cplx>(), err};
}

TransportResult holonomy(const ConnectionModel& model, const BaseLoop& loop, int steps, const Reparam& sigma) {
  return transport(model, loop, 0.0, 1.0, steps, sigma);
}

MonodromyData floquet(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) throw RejectedInput("floquet: holonomy is not square");
  const double res = (g.adjoint() * g - Matrix::Identity(g.rows(), g.cols())).norm();
  if (res > 1e-8) throw RejectedInput("floquet: holonomy is not unitary (residual " + std::to_string(res) + ")");
  const auto eig = normal_eigen(g);
  const auto n = g.rows();
  std::vector<double> s(static_cast<size_t>(n));
  for (const auto& cluster : eig.clusters()) {
    cplx mean = 0.0;
    for (auto i : cluster) mean += eig.eigenvalues(i);
    double e = std::arg(mean) / kTwoPi;
    if (e > 0.5 - 1e-9) e -= 1.0;
    for (auto i : cluster) s[static_cast<size_t>(i)] = e;
  }
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return s[a] < s[b]; });
  MonodromyData out;
  out.holonomy = g;
  out.frame = Matrix(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.exponents.push_back(s[static_cast<size_t>(order[k])]);
    out.frame.col(k) = eig.vectors.col(order[k]);
  }
  return out;
}

MonodromyData monodromy(const ConnectionModel& model, const BaseLoop& loop, int grid, int steps, const Reparam& sigma) {
  require_steps(steps);
  validate_loop(model.kind(), loop);
  sigma.validate();
  if (grid <= 0 || steps % grid != 0) throw RejectedInput("monodromy: steps must be a multiple of the grid size");
  const auto n = model.rank();
  const int sub = steps / grid;
  std::vector<Matrix> frames;
  frames.reserve(grid + 1);
  RealMatrix phi = RealMatrix::Identity(n, n);
  frames.push_back(phi.cast<cplx>());
  for (int i = 0; i < grid; ++i) {
    phi = rk4(model, loop, sigma, phi, static_cast<double>(i) / grid, static_cast<double>(i + 1) / grid, sub);
    frames.push_back(phi.cast<cplx>());
  }
  const RealMatrix fine = rk4(model, loop, sigma, RealMatrix::Identity(n, n), 0.0, 1.0, 2 * steps);
  const double err = (phi - fine).norm();
  if (err > 1e-6) throw ConvergenceError("monodromy: step doubling changed the holonomy by " + std::to_string(err));
  MonodromyData out = floquet(frames.back());
  out.transported = std::move(frames);
  out.doubling_error = err;
  return out;
}

FiberBasis eigen_sections(const MonodromyData& data, int bound) {
  if (bound < 0) throw RejectedInput("eigen_sections: negative mode bound");
  const int grid = data.grid();
  if (grid < 1) throw RejectedInput("eigen_sections: monodromy data carries no transported frame");
  const auto n = data.holonomy.rows();
  FiberBasis basis;
  basis.bound = bound;
  basis.dim = n;
  basis.exponents = data.exponents;
  for (int p = -bound; p <= bound; ++p) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double nu = p - data.exponents[static_cast<size_t>(j)];
      SampledSection sec(n, grid);
      for (int i = 0; i < grid; ++i) {
        const double t = static_cast<double>(i) / grid;
        sec.col(i) = std::polar(1.0, kTwoPi * nu * t) * (data.transported[i] * data.frame.col(j));
      }
      const Vector end = std::polar(1.0, kTwoPi * nu) * (data.transported[grid] * data.frame.col(j));
      basis.periodicity_error = std::max(basis.periodicity_error, (end - sec.col(0)).norm());
      basis.labels.emplace_back(p, j);
      basis.sections.push_back(std::move(sec));
    }
  }
  if (basis.periodicity_error > 1e-8)
    throw ConvergenceError("eigen_sections: sections are not periodic (" + std::to_string(basis.periodicity_error) +
                           "); holonomy and frame are inconsistent");
  return basis;
}

cplx l2_pairing(const SampledSection& a, const SampledSection& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw RejectedInput("l2_pairing: shape mismatch");
  return (a.adjoint() * b).trace() / static_cast<double>(a.cols());
}

Matrix gram_matrix(const FiberBasis& basis) {
  const auto m = basis.size();
  Matrix big(basis.dim * basis.sections.front().cols(), m);
  for (Eigen::Index k = 0; k < m; ++k) big.col(k) = basis.sections[k].reshaped();
  return big.adjoint() * big / static_cast<double>(basis.sections.front().cols());
}

double gram_error(const FiberBasis& basis) {
  const Matrix g = gram_matrix(basis);
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double d_hat_residual(const ConnectionModel& model, const BaseLoop& loop, const FiberBasis& basis, const Reparam& sigma) {
  const auto grid = basis.sections.front().cols();
  std::vector<RealMatrix> a;
  a.reserve(grid);
  for (Eigen::Index i = 0; i < grid; ++i) a.push_back(model.connection(loop, static_cast<double>(i) / grid, sigma));
  double worst = 0.0;
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    const auto& phi = basis.sections[k];
    const auto [p, j] = basis.labels[k];
    const Matrix dphi = periodic_derivative(phi);
    const cplx expected(0.0, p - basis.exponents[static_cast<size_t>(j)]);
    Matrix r(phi.rows(), grid);
    for (Eigen::Index i = 0; i < grid; ++i)
      r.col(i) = (dphi.col(i) - a[i] * phi.col(i)) / kTwoPi - expected * phi.col(i);
    worst = std::max(worst, r.norm() / phi.norm());
  }
  return worst;
}

FiberSection project_section(const SampledSection& alpha, const FiberBasis& basis) {
  FiberSection out;
  out.bound = basis.bound;
  out.coeffs = Matrix::Zero(2 * basis.bound + 1, basis.dim);
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    const auto [p, j] = basis.labels[k];
    out.coeffs(p + basis.bound, j) = l2_pairing(basis.sections[k], alpha);
  }
  const double norm = alpha.norm();
  out.residual = norm == 0.0 ? 0.0 : (alpha - reconstruct(out, basis)).norm() / norm;
  return out;
}

SampledSection reconstruct(const FiberSection& s, const FiberBasis& basis) {
  if (s.bound != basis.bound || s.coeffs.cols() != basis.dim) throw RejectedInput("reconstruct: basis mismatch");
  SampledSection out = SampledSection::Zero(basis.dim, basis.sections.front().cols());
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    const auto [p, j] = basis.labels[k];
    out += s.coeff(p, j) * basis.sections[k];
  }
  return out;
}

cplx cos_inner_product(const FiberSection& a, const FiberSection& b, const std::vector<double>& exponents, double r) {
  if (!(r > 1.0)) throw RejectedInput("cos_inner_product: r must exceed 1");
  if (a.bound != b.bound || a.coeffs.cols() != b.coeffs.cols() ||
      static_cast<Eigen::Index>(exponents.size()) != a.coeffs.cols())
    throw RejectedInput("cos_inner_product: sections do not share a basis");
  const double log_r = std::log(r);
  cplx sum = 0.0;
  for (int p = -a.bound; p <= a.bound; ++p)
    for (Eigen::Index j = 0; j < a.coeffs.cols(); ++j) {
      const double w = std::cosh((p - exponents[static_cast<size_t>(j)]) * log_r);
      sum += w * w * std::conj(a.coeff(p, j)) * b.coeff(p, j);
    }
  return sum;
}

Matrix cos_gram(const FiberBasis& basis, double r) {
  std::vector<FiberSection> proj;
  proj.reserve(basis.sections.size());
  for (const auto& s : basis.sections) proj.push_back(project_section(s, basis));
  const auto m = basis.size();
  Matrix g(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b) g(a, b) = cos_inner_product(proj[a], proj[b], basis.exponents, r);
  return g;
}

double condiff_residual(const ConnectionModel& model, const BaseLoop& loop, const Reparam& sigma,
                        const SectionFunction& alpha, int grid) {
  sigma.validate();
  if (sigma.orientation != 1) throw RejectedInput("condiff_residual: sigma must preserve orientation");
  validate_loop(model.kind(), loop);
  const double h = 1.0 / grid;
  const SectionFunction composed = [&](double t) { return alpha(sigma(t)); };
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / grid;
    const double s = sigma(t);
    const Vector a_s = alpha(s);
    const Vector lhs = central_derivative(composed, t, h) - model.connection(loop, t, sigma).cast<cplx>() * a_s;
    const Vector rhs = sigma.derivative(t) * (central_derivative(alpha, s, h) - model.connection(loop, s).cast<cplx>() * a_s);
    worst = std::max(worst, (lhs - rhs).norm());
    scale = std::max(scale, alpha(t).norm());
  }
  return scale == 0.0 ? 0.0 : worst / scale;
}

ReparamReport reparam_actions(const ConnectionModel& model, const BaseLoop& loop, const Reparam& sigma, int bound,
                              int grid, int steps) {
  sigma.validate();
  const auto n = model.rank();
  const auto data = monodromy(model, loop, grid, steps);
  const auto data_s = monodromy(model, loop, grid, steps, sigma);
  const auto basis_s = eigen_sections(data_s, bound);
  const int sub = steps / grid;

  // Phi at arbitrary times: short RK4 leg from the nearest grid point, then
  // Phi(tau + m) = Phi(tau) g^m.
  const RealMatrix g = data.holonomy.real();
  auto phi_at = [&](double tau) -> RealMatrix {
    const double m = std::floor(tau);
    const double frac = tau - m;
    const int k = std::min(grid - 1, static_cast<int>(std::floor(frac * grid)));
    RealMatrix phi = rk4(model, loop, Reparam{}, data.transported[k].real(), static_cast<double>(k) / grid, frac, sub);
    RealMatrix gm = RealMatrix::Identity(n, n);
    const RealMatrix step = m >= 0 ? g : RealMatrix(g.transpose());
    for (long c = 0; c < static_cast<long>(std::abs(m)); ++c) gm = gm * step;
    return phi * gm;
  };

  std::vector<RealMatrix> phi_sigma;
  phi_sigma.reserve(grid);
  for (int i = 0; i < grid; ++i) phi_sigma.push_back(phi_at(sigma(static_cast<double>(i) / grid)));

  ReparamReport out;
  for (int p = -bound; p <= bound; ++p) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double nu = p - data.exponents[static_cast<size_t>(j)];
      std::vector<Matrix> coords;
      coords.reserve(grid);
      for (int i = 0; i < grid; ++i) {
        const double t = static_cast<double>(i) / grid;
        const Vector value = std::polar(1.0, kTwoPi * nu * sigma(t)) * (phi_sigma[i].cast<cplx>() * data.frame.col(j));
        Vector c = data_s.frame.adjoint() * data_s.transported[i].inverse() * value;
        for (Eigen::Index k = 0; k < n; ++k) c(k) *= std::polar(1.0, kTwoPi * data_s.exponents[static_cast<size_t>(k)] * t);
        coords.push_back(c);
      }
      const double res = polynomiality_residual(SampledLoop(n, 1, std::move(coords)), std::abs(p) + 1);
      out.standard_residual = std::max(out.standard_residual, res);
    }
  }

  // Transport action: coefficients carried unchanged to the fibre over gamma o sigma.
  FiberSection coeffs;
  coeffs.bound = bound;
  coeffs.coeffs = Matrix(2 * bound + 1, n);
  for (int p = -bound; p <= bound; ++p)
    for (Eigen::Index j = 0; j < n; ++j) coeffs.coeffs(p + bound, j) = cplx(1.0 / (1.0 + std::abs(p)), 0.1 * j);
  const SampledSection rebuilt = reconstruct(coeffs, basis_s);
  Vector end = Vector::Zero(n);
  for (int p = -bound; p <= bound; ++p)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double nu = p - data_s.exponents[static_cast<size_t>(j)];
      end += coeffs.coeff(p, j) * std::polar(1.0, kTwoPi * nu) * (data_s.transported[grid] * data_s.frame.col(j));
    }
  out.transport_periodicity = (end - rebuilt.col(0)).norm();
  const auto back = project_section(rebuilt, basis_s);
  out.coefficient_drift = (back.coeffs - coeffs.coeffs).cwiseAbs().maxCoeff();
  return out;
}

CounterexampleReport subbundle_counterexample(const std::function<double(double)>& gamma, const MatrixLoop& beta,
                                              int grid) {
  const double jump = gamma(1.0) - gamma(0.0);
  const double winding = std::round(jump);
  if (std::abs(jump - winding) > 1e-9) throw RejectedInput("subbundle_counterexample: gamma(t+1) - gamma(t) is not an integer");
  const int degree = beta.degree() + static_cast<int>(std::abs(winding)) + 4;
  const auto samples = SampledLoop::sample(
      [&](double t) -> Matrix { return std::polar(1.0, kTwoPi * gamma(t)) * laurent_eval(beta, t); }, beta.rows(),
      beta.cols(), grid);
  return {polynomiality_residual(samples, degree), degree, static_cast<int>(winding)};
}

}  // namespace polyloop
