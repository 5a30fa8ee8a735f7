#include "polyloop/suite.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "polyloop/errors.hpp"
#include "polyloop/holonomy.hpp"
#include "polyloop/reference.hpp"
#include "polyloop/sequence_spaces.hpp"

namespace polyloop {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

MatrixLoop random_loop(Rng& rng, Eigen::Index n, int degree, Field field) {
  std::map<int, Matrix> c;
  for (int k = -degree; k <= degree; ++k) c[k] = rng.gaussian(n, n);
  if (field == Field::real) {
    c[0] = c[0].real().cast<cplx>();
    for (int k = 1; k <= degree; ++k) c[-k] = c[k].conjugate();
  }
  return MatrixLoop::from_coeffs(std::move(c), field);
}

// U diag(z^{k_j}) U^*, a polynomial loop in U(n) (SU(n) when sum k_j = 0).
MatrixLoop elementary_loop(Rng& rng, Eigen::Index n, bool special) {
  const Matrix u = rng.unitary(n);
  std::vector<int> ks(static_cast<size_t>(n));
  int sum = 0;
  for (Eigen::Index j = 0; j < n; ++j) sum += ks[j] = rng.integer(-2, 2);
  if (special) ks[static_cast<size_t>(n - 1)] -= sum;
  std::map<int, Matrix> c;
  for (Eigen::Index j = 0; j < n; ++j) {
    auto [it, _] = c.try_emplace(ks[j], Matrix::Zero(n, n));
    it->second += u.col(j) * u.col(j).adjoint();
  }
  return MatrixLoop::from_coeffs(std::move(c));
}

LoopVector random_vector(Rng& rng, Eigen::Index n, int bound) { return LoopVector(bound, rng.gaussian(n, 2 * bound + 1)); }

ShiftData random_shift(Rng& rng, Eigen::Index n) {
  std::vector<double> s;
  for (Eigen::Index j = 0; j < n; ++j) s.push_back(rng.uniform(-1.0, 1.0));
  return ShiftData(rng.unitary(n), s);
}

// Unitary with eigenvalues drawn from a short list, so eigenspaces are degenerate.
struct DegenerateUnitary {
  Matrix g;
  Matrix v;
  std::vector<double> angles;
  std::vector<int> block;  ///< cluster label of each eigenvector
};

DegenerateUnitary degenerate_unitary(Rng& rng, Eigen::Index n) {
  const int distinct = rng.integer(1, static_cast<int>(n));
  std::vector<double> palette;
  for (int k = 0; k < distinct; ++k) palette.push_back(rng.uniform(-kPi, kPi));
  DegenerateUnitary out;
  out.v = rng.unitary(n);
  Vector d(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int c = j < distinct ? static_cast<int>(j) : rng.integer(0, distinct - 1);
    out.block.push_back(c);
    out.angles.push_back(palette[static_cast<size_t>(c)]);
    d(j) = std::polar(1.0, palette[static_cast<size_t>(c)]);
  }
  out.g = out.v * d.asDiagonal() * out.v.adjoint();
  return out;
}

// Unitary mixing only within the degenerate blocks of `du`, expressed in the standard basis.
Matrix block_unitary(Rng& rng, const DegenerateUnitary& du) {
  const auto n = du.g.rows();
  Matrix w = Matrix::Zero(n, n);
  const int blocks = *std::max_element(du.block.begin(), du.block.end()) + 1;
  for (int b = 0; b < blocks; ++b) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (du.block[j] == b) idx.push_back(j);
    const Matrix u = rng.unitary(static_cast<Eigen::Index>(idx.size()));
    for (size_t a = 0; a < idx.size(); ++a)
      for (size_t c = 0; c < idx.size(); ++c) w(idx[a], idx[c]) = u(a, c);
  }
  return du.v * w * du.v.adjoint();
}

RealMatrix random_structure(Rng& rng, Eigen::Index n) {
  const RealMatrix o = rng.special_orthogonal(n);
  return o * standard_unitary_structure(n) * o.transpose();
}

BaseLoop random_sphere_loop(Rng& rng) {
  BaseLoop l;
  l.theta = rng.uniform(0.5, 2.6);
  l.theta_amp = rng.uniform(0.0, 0.3);
  l.theta_phase = rng.uniform(0.0, kTwoPi);
  l.winding = rng.integer(-2, 2);
  l.phi_amp = rng.uniform(0.0, 0.2);
  l.phi_freq = rng.integer(1, 3);
  return l;
}

BaseLoop random_loop_for(Rng& rng, ModelKind m) {
  BaseLoop l = random_sphere_loop(rng);
  if (m == ModelKind::su2) {
    l.axis = {rng.normal(), rng.normal(), rng.normal()};
    l.winding = rng.integer(-2, 2);
  }
  if (m == ModelKind::torus) l.torus_winding = {rng.integer(-3, 3), rng.integer(-3, 3)};
  return l;
}

double comm(const Matrix& a, const Matrix& b) { return (a * b - b * a).norm(); }

// Residual of the columns of `a` after projection onto the span of the
// orthonormal columns of `b` (both sampled; inner product sums over rows).
double span_residual(const Matrix& a, const Matrix& b) {
  const Matrix proj = b * (b.adjoint() * a);
  return (a - proj).norm() / std::max(1e-300, a.norm());
}

Matrix stacked(const FiberBasis& b, const std::vector<Eigen::Index>& pick) {
  const auto rows = b.dim * b.sections.front().cols();
  Matrix out(rows, static_cast<Eigen::Index>(pick.size()));
  for (size_t k = 0; k < pick.size(); ++k) out.col(k) = b.sections[pick[k]].reshaped();
  return out;
}

// ---------------------------------------------------------------- laurent

void laurent_eval_homomorphism(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double mul = 0.0, adj = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(1, 4);
    const Field f = rng.uniform() < 0.5 ? Field::real : Field::complex;
    const auto a = random_loop(rng, n, rng.integer(0, 4), f);
    const auto b = random_loop(rng, n, rng.integer(0, 4), f);
    const auto ab = a * b;
    for (int s = 0; s < 8; ++s) {
      const double t = rng.uniform();
      const Matrix ea = laurent_eval(a, t), eb = laurent_eval(b, t);
      mul = std::max(mul, (laurent_eval(ab, t) - ea * eb).norm() / std::max(1.0, ea.norm() * eb.norm()));
      adj = std::max(adj, (laurent_eval(a.adjoint(), t) - ea.adjoint()).norm() / std::max(1.0, ea.norm()));
      if (f == Field::real) adj = std::max(adj, laurent_eval(ab, t).imag().norm() / std::max(1.0, ea.norm() * eb.norm()));
    }
  }
  ctx.below("product_err", mul, 1e-12);
  ctx.below("adjoint_err", adj, 1e-12);
}

void laurent_fft_projection(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double coeff = 0.0, poly = 0.0, detect = INFINITY, bessel = 0.0, direct = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(1, 3);
    const int d = rng.integer(1, 8);
    const auto a = random_loop(rng, n, d, Field::complex);
    const auto s = SampledLoop::sample(a);
    const auto proj = fourier_project(s, d);
    for (int k = -d; k <= d; ++k) coeff = std::max(coeff, (proj.loop.coeff(k) - a.coeff(k)).norm());
    poly = std::max(poly, polynomiality_residual(s, d));
    detect = std::min(detect, polynomiality_residual(s, d - 1));

    const double c = rng.uniform(0.1, 2.0);
    const int nb = rng.integer(1, 6);
    const auto e = SampledLoop::sample([c](double t) { return Matrix::Constant(1, 1, std::exp(c * std::sin(kTwoPi * t))); }, 1, 1);
    const double oracle = reference::modified_bessel_tail(c, nb) / reference::modified_bessel_total(c);
    bessel = std::max(bessel, std::abs(polynomiality_residual(e, nb) - oracle));

    const auto f = [&a](double t) { return laurent_eval(a, t); };
    const auto small = SampledLoop::sample(f, n, n, 64);
    direct = std::max(direct, std::abs(polynomiality_residual(small, d / 2) - reference::direct_tail(f, d / 2, 64)));
  }
  ctx.below("coeff_err", coeff, 1e-12);
  ctx.below("poly_residual", poly, 1e-8);
  ctx.above("truncated_residual", detect, 1e-3);
  ctx.below("bessel_err", bessel, 1e-10);
  ctx.below("direct_dft_err", direct, 1e-10);
}

void laurent_group_membership(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double u = 0.0, su = 0.0, so = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(2, 4);
    const auto a = elementary_loop(rng, n, false) * elementary_loop(rng, n, false);
    u = std::max(u, group_residual(a, Group::U));
    const auto b = elementary_loop(rng, n, true) * elementary_loop(rng, n, true);
    su = std::max(su, group_residual(b, Group::SU));
    // Real rotation loop t -> R(2 pi k t) conjugated by a fixed rotation.
    const int k = rng.integer(1, 3) * (rng.uniform() < 0.5 ? -1 : 1);
    const RealMatrix o = rng.special_orthogonal(2);
    Matrix plus(2, 2), minus(2, 2);
    plus << 0.5, cplx(0, 0.5), cplx(0, -0.5), 0.5;
    minus = plus.conjugate();
    const Matrix oc = o.cast<cplx>();
    const auto rot = MatrixLoop::from_coeffs({{k, oc * plus * oc.transpose()}, {-k, oc * minus * oc.transpose()}}, Field::real);
    so = std::max(so, group_residual(rot * rot, Group::SO));
  }
  ctx.below("u_residual", u, 1e-10);
  ctx.below("su_residual", su, 1e-10);
  ctx.below("so_residual", so, 1e-10);
}

// ---------------------------------------------------------------- sequence spaces

void seq_cosh_inequality(PropertyContext& ctx) {
  double upper = -INFINITY, lower = -INFINITY;
  for (double r : {1.1, 2.0, 5.0}) {
    const double l = std::log(r);
    for (int a = -100; a <= 100; ++a) {
      for (int b = -100; b <= 100; ++b) {
        const double x = 0.1 * a, t = 0.1 * b;
        const double left = std::cosh(t * l);
        const double mid = std::cosh((x + t) * l) / std::pow(r, std::abs(x));
        const double right = 0.5 * std::min(std::pow(r, t), std::pow(r, -t));
        upper = std::max(upper, (mid - left) / std::max(1.0, left));
        lower = std::max(lower, (right - mid) / std::max(1.0, mid));
      }
    }
  }
  ctx.below("upper_violation", upper, 1e-12);
  ctx.below("lower_violation", lower, 1e-12);
}

void seq_cos_r_isomorphism(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  const double radii[] = {1.1, 2.0, 5.0};
  double roundtrip = 0.0, lo = -INFINITY, hi = -INFINITY;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(1, 3);
    const double r = radii[rng.integer(0, 2)];
    const auto s = random_shift(rng, n);
    const auto v = random_vector(rng, n, 64);
    const auto back = apply_cos_r(apply_cos_r_inverse(v, s, r), s, r);
    roundtrip = std::max(roundtrip, (back.coeffs() - v.coeffs()).norm() / v.coeffs().norm());
    const double cv = l2_norm(apply_cos_r(v, s, r));
    double cmax = 0.0, cmin = INFINITY;
    for (double sj : s.shifts()) {
      cmax = std::max(cmax, std::cosh(sj * std::log(r)));
      cmin = std::min(cmin, 0.5 * std::pow(r, -std::abs(sj)));
    }
    const double nr = l2r_norm(v, r);
    lo = std::max(lo, (cv / cmax - nr) / nr);
    hi = std::max(hi, (nr - cv / cmin) / nr);
  }
  ctx.below("roundtrip_err", roundtrip, 1e-12);
  ctx.below("lower_bound_violation", lo, 1e-12);
  ctx.below("upper_bound_violation", hi, 1e-12);
}

void seq_intertwining(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double err = 0.0, jj = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(1, 3);
    const auto s = random_shift(rng, n);
    const double r = rng.uniform(1.1, 4.0);
    const int bound = 16;
    for (int p = -bound; p <= bound; ++p)
      for (Eigen::Index j = 0; j < n; ++j) {
        const auto e = LoopVector::basis(n, bound, p, j);
        const auto lhs = apply_cos_r_inverse(apply_J(apply_cos_r(e, s, r)), s, r);
        err = std::max(err, (lhs.coeffs() - apply_J(e).coeffs()).norm());
      }
    const auto v = random_vector(rng, n, bound);
    jj = std::max(jj, (apply_J(apply_J(v)).coeffs() + v.coeffs()).norm());
  }
  ctx.below("intertwining_err", err, 1e-12);
  ctx.below("j_squared_err", jj, 1e-15);
}

void seq_unitary_action(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double l2 = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(1, 4);
    const auto a = elementary_loop(rng, n, false) * elementary_loop(rng, n, false);
    const auto v = random_vector(rng, n, 8);
    l2 = std::max(l2, std::abs(l2_norm(apply_loop(a, v)) / l2_norm(v) - 1.0));
  }
  const auto z = MatrixLoop::monomial(1, Matrix::Identity(1, 1));
  const auto e = LoopVector::basis(1, 0, 0, 0);
  const double witness = std::abs(l2r_norm(apply_loop(z, e), 2.0) / l2r_norm(e, 2.0) - 1.0);
  ctx.below("l2_isometry_err", l2, 1e-10);
  ctx.above("l2r_non_isometry", witness, 0.5);
}

void seq_hs_closed_form(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double err = 0.0;
  int cases = 0;
  for (Eigen::Index n = 1; n <= 4; ++n)
    for (int k = -5; k <= 5; ++k)
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          Matrix c = Matrix::Zero(n, n);
          c(i, j) = 1.0;
          const auto a = MatrixLoop::monomial(k, c);
          err = std::max(err, std::abs(hs_commutator_norm(a) - reference::brute_force_hs(a, 6)));
          ++cases;
        }
  for (int mask = 1; mask < (1 << 11); ++mask) {
    std::map<int, Matrix> c;
    for (int b = 0; b < 11; ++b)
      if (mask & (1 << b)) c[b - 5] = Matrix::Constant(1, 1, cplx(1.0 + b, 0.5 * b));
    const auto a = MatrixLoop::from_coeffs(std::move(c));
    err = std::max(err, std::abs(hs_commutator_norm(a) - reference::brute_force_hs(a, 6)));
    ++cases;
  }
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const auto a = random_loop(rng, rng.integer(1, 4), rng.integer(0, 5), Field::complex);
    err = std::max(err, std::abs(hs_commutator_norm(a) - reference::brute_force_hs(a, a.degree() + 1)));
    ++cases;
  }
  ctx.result().trials = cases;
  ctx.below("abs_err", err, 1e-8);
}

void seq_conjugated_hs(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double increment = 0.0, oracle = 0.0, limit = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(1, 3);
    const int d = rng.integer(0, 3);
    const auto a = random_loop(rng, n, d, Field::complex);
    const auto s = random_shift(rng, n);
    const double r = rng.uniform(1.1, 3.0);
    const auto tail = conjugated_hs_tail(a, s, r, 64);
    for (int p = 40; p <= 64; ++p) increment = std::max(increment, std::abs(tail[p] - tail[p - 1]) / std::max(1.0, tail[p]));
    const int b = rng.integer(0, 8);
    oracle = std::max(oracle, std::abs(tail[b] - reference::brute_force_conjugated_hs(a, s, r, b)) / std::max(1.0, tail[b]));
    const auto near_one = conjugated_hs_tail(a, ShiftData::standard(n), 1.0 + 1e-9, d + 1);
    limit = std::max(limit, std::abs(near_one.back() - hs_commutator_norm(a)) / std::max(1.0, hs_commutator_norm(a)));
  }
  ctx.below("tail_increment", increment, 1e-10);
  ctx.below("brute_force_err", oracle, 1e-8);
  ctx.below("r_to_one_err", limit, 1e-6);
}

// ---------------------------------------------------------------- spectral

void spectral_exp_log(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double exp_err = 0.0, window = 0.0, commute = 0.0;
  for (Eigen::Index n : {2, 3, 4})
    for (double c : {0.0, kPi / 2, kPi})
      for (int trial = 0; trial < ctx.trials(); ++trial) {
        const Matrix g = rng.unitary(n);
        try {
          const auto l = log_branch(g, c);
          exp_err = std::max(exp_err, (exp_skew(l) - g).norm());
          for (Eigen::Index j = 0; j < n; ++j) window = std::max(window, std::abs(l.frequencies()(j) - c) - kPi);
          commute = std::max(commute, comm(l.matrix(), g));
        } catch (const BranchCutError&) {
          ctx.reject();
        }
      }
  ctx.result().trials = 9 * ctx.trials();
  ctx.below("exp_log_err", exp_err, 1e-9);
  ctx.below("branch_window_excess", window, 1e-12);
  ctx.below("commutator", commute, 1e-9);
}

void spectral_exp_oracle(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double oracle = 0.0, unitary = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(1, 6);
    const auto xi = rng.skew(n, rng.uniform(0.1, 10.0));
    const Matrix e = exp_skew(xi);
    oracle = std::max(oracle, (e - reference::pade_exp(xi.matrix())).norm());
    unitary = std::max(unitary, (e.adjoint() * e - Matrix::Identity(n, n)).norm());
  }
  ctx.below("pade_err", oracle, 1e-9);
  ctx.below("unitarity_err", unitary, 1e-10);
}

void spectral_eta_pair(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double res = 0.0, group = 0.0;
  for (Eigen::Index n : {2, 3, 4})
    for (int trial = 0; trial < ctx.trials(); ++trial) {
      const auto xi2 = rng.skew(n, rng.uniform(0.5, 4.0));
      Vector d(n);
      for (Eigen::Index j = 0; j < n; ++j) d(j) = cplx(0.0, xi2.frequencies()(j) + kTwoPi * rng.integer(-2, 2));
      const SkewMatrix xi1(Matrix(xi2.eigenvectors() * d.asDiagonal() * xi2.eigenvectors().adjoint()), 1e-8);
      const auto pl = eta_pair_loop(xi1, xi2);
      res = std::max(res, pl.residual);
      group = std::max(group, group_residual(pl.loop, Group::U, 16));
    }
  ctx.result().trials = 3 * ctx.trials();
  ctx.below("poly_residual", res, 1e-8);
  ctx.below("loop_group_residual", group, 1e-8);
}

void spectral_central_log(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double commute = 0.0, exp_err = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const auto du = degenerate_unitary(rng, rng.integer(2, 4));
    const auto zeta = central_log(du.g);
    exp_err = std::max(exp_err, (exp_skew(zeta) - du.g).norm());
    for (int alt = 0; alt < 20; ++alt) {
      const Matrix w = block_unitary(rng, du) * du.v;
      Vector d(du.g.rows());
      for (Eigen::Index j = 0; j < d.size(); ++j) d(j) = cplx(0.0, du.angles[j] + kTwoPi * rng.integer(-3, 3));
      const Matrix other = w * d.asDiagonal() * w.adjoint();
      exp_err = std::max(exp_err, (reference::pade_exp(other) - du.g).norm() > 1e-9 ? INFINITY : 0.0);
      commute = std::max(commute, comm(zeta.matrix(), other));
    }
  }
  ctx.below("commutator", commute, 1e-9);
  ctx.below("exp_err", exp_err, 1e-9);
}

void spectral_exp_pi_j(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double err = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = 2 * rng.integer(1, 3);
    const RealMatrix j = random_structure(rng, n);
    err = std::max(err, (SkewMatrix::real(kPi * j).exp() + Matrix::Identity(n, n)).norm());
  }
  ctx.below("exp_pi_j_err", err, 1e-9);
}

void spectral_structure_pairs(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double res = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const auto j1 = SkewMatrix::real(kPi * random_structure(rng, 4));
    const auto j2 = SkewMatrix::real(kPi * random_structure(rng, 4));
    const auto s = SampledLoop::sample([&](double t) -> Matrix { return j1.exp(-t) * j2.exp(t); }, 4, 4);
    res = std::max(res, polynomiality_residual(s, 2));
  }
  ctx.below("poly_residual", res, 1e-8);
}

void spectral_unitary_structure(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double square = 0.0, orth = 0.0, commute = 0.0, fixed = 0.0, shift = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = 2 * rng.integer(1, 3);
    const auto xi = rng.real_skew(n, rng.uniform(0.5, 3.0));
    const RealMatrix j = unitary_structure(xi);
    const RealMatrix id = RealMatrix::Identity(n, n);
    square = std::max(square, (j * j + id).norm());
    orth = std::max(orth, (j.transpose() * j - id).norm());
    commute = std::max(commute, (xi.real_matrix() * j - j * xi.real_matrix()).norm());
    const RealMatrix js = random_structure(rng, n);
    fixed = std::max(fixed, (unitary_structure(SkewMatrix::real(js)) - js).norm());
    shift = std::max(shift, (unitary_structure(SkewMatrix::real(xi.real_matrix() + 0.7 * j)) - j).norm());
  }
  ctx.below("j_squared_err", square, 1e-9);
  ctx.below("orthogonality_err", orth, 1e-9);
  ctx.below("commutator", commute, 1e-9);
  ctx.below("j_of_j_err", fixed, 1e-9);
  ctx.below("shift_invariance_err", shift, 1e-9);
}

void spectral_log0(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double exp_err = 0.0, split = 0.0, jxi = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index m = rng.integer(1, 3);
    const Eigen::Index n = 2 * m;
    RealMatrix d = RealMatrix::Zero(n, n);
    for (Eigen::Index b = 0; b < m; ++b) {
      const double phi = (trial % 2 == 1 && b == 0) ? kPi : rng.uniform(0.2, kPi);
      d.block(2 * b, 2 * b, 2, 2) << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    }
    const RealMatrix o = rng.special_orthogonal(n);
    const RealMatrix g = o * d * o.transpose();
    const auto dec = log0_decompose(g);
    exp_err = std::max(exp_err, (dec.xi.exp() - g.cast<cplx>()).norm());
    const auto l0 = log_branch(-g.cast<cplx>(), 0.0);
    split = std::max(split, (dec.xi.matrix() - kPi * dec.J.cast<cplx>() - l0.matrix()).norm());
    jxi = std::max(jxi, (unitary_structure(dec.xi) - dec.J).norm());
  }
  ctx.below("exp_err", exp_err, 1e-9);
  ctx.below("log0_split_err", split, 1e-9);
  ctx.below("j_xi_err", jxi, 1e-9);
}

void spectral_centraliser_torus(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double worst = 0.0, ends = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const auto du = degenerate_unitary(rng, rng.integer(2, 4));
    const auto eig = normal_eigen(du.g);
    const auto clusters = eig.clusters();
    std::vector<Matrix> proj;
    std::vector<double> phase;
    for (const auto& c : clusters) {
      proj.push_back(eig.projector(c));
      phase.push_back(rng.uniform(-kPi, kPi));
    }
    const auto n = du.g.rows();
    auto alpha = [&](double t) {
      Matrix a = Matrix::Zero(n, n);
      for (size_t c = 0; c < proj.size(); ++c) a += std::polar(1.0, t * phase[c]) * proj[c];
      return a;
    };
    Matrix h = alpha(1.0);
    ends = std::max(ends, (alpha(0.0) - Matrix::Identity(n, n)).norm());
    const Matrix other = block_unitary(rng, du);
    for (int i = 0; i <= 32; ++i) {
      const Matrix a = alpha(i / 32.0);
      worst = std::max({worst, comm(a, du.g), comm(a, other)});
    }
    worst = std::max(worst, comm(h, other));
  }
  ctx.below("centraliser_commutator", worst, 1e-9);
  ctx.below("endpoint_err", ends, 1e-12);
}

// ---------------------------------------------------------------- path sections

void run_sweeps(PropertyContext& ctx, Group group) {
  double endpoint = 0.0, poly = 0.0, grp = 0.0, det = 0.0;
  int total = 0;
  for (Eigen::Index n = 2; n <= 6; ++n) {
    SweepOptions o;
    o.group = group;
    o.dim = n;
    o.trials = ctx.trials();
    o.cut_fraction = group == Group::SO ? 0.0 : 0.05;
    const auto r = run_section_sweep(o, ctx.rng());
    endpoint = std::max(endpoint, r.max_endpoint_err);
    poly = std::max(poly, r.max_poly_residual);
    grp = std::max(grp, r.max_group_residual);
    det = std::max(det, r.max_det_deviation);
    total += r.trials;
    for (int k = 0; k < r.rejections; ++k) ctx.reject();
    for (const auto& f : r.failures) ctx.fail("dim " + std::to_string(n) + " " + f);
  }
  ctx.result().trials = total;
  ctx.below("endpoint_err", endpoint, 1e-9);
  ctx.below("group_residual", grp, 1e-9);
  if (group != Group::U) ctx.below("det_deviation", det, 1e-10);
  ctx.below("poly_residual", poly, 1e-8);
}

void sections_actions(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double periodic = 0.0, conj = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(2, 4);
    const PathElement p(Group::U, {rng.skew(n, 2.0), SkewMatrix(Matrix(cplx(0, kTwoPi) * Matrix::Identity(n, n)))},
                        elementary_loop(rng, n, false));
    const Matrix k = rng.unitary(n);
    const Matrix base = project_path(p);
    const auto left = p.left_multiplied(k);
    const auto cj = p.conjugated(k);
    periodic = std::max({periodic, periodicity_defect(p), periodicity_defect(left), periodicity_defect(cj)});
    conj = std::max(conj, (project_path(left) - k * base * k.adjoint()).norm());
    conj = std::max(conj, (project_path(cj) - k * base * k.adjoint()).norm());
  }
  ctx.below("periodicity_defect", periodic, 1e-9);
  ctx.below("conjugation_err", conj, 1e-9);
}

void sections_smooth(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double endpoint = 0.0, junction = 0.0, group = 0.0, quasi = 0.0;
  const Group groups[] = {Group::U, Group::SU, Group::SO};
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Group gr = groups[trial % 3];
    const Eigen::Index n = rng.integer(2, 4);
    Matrix g;
    SkewMatrix x = SkewMatrix::zero(n);
    if (gr == Group::U) {
      g = rng.unitary(n);
      x = rng.skew(n, 0.3);
    } else if (gr == Group::SU) {
      g = rng.special_unitary(n);
      const auto y = rng.skew(n, 0.3);
      x = y - SkewMatrix(Matrix(y.matrix().trace() / static_cast<double>(n) * Matrix::Identity(n, n)));
    } else {
      g = rng.special_orthogonal(n).cast<cplx>();
      x = rng.real_skew(n, 0.3);
    }
    const Matrix h = g * x.exp();
    const SmoothSection s(gr, g, h);
    endpoint = std::max({endpoint, (s(1.0) - h).norm(), (s(0.5) - g).norm(), (s(0.0) - Matrix::Identity(n, n)).norm()});
    const auto jm = junction_mismatch(s);
    junction = std::max({junction, jm.middle, jm.seam});
    for (const auto& v : s.sample(64)) group = std::max(group, matrix_group_residual(v, gr));
    for (int i = 0; i < 8; ++i) {
      const double t = rng.uniform(-1.0, 1.0);
      quasi = std::max(quasi, (s(t + 1.0) - h * s(t)).norm());
    }
  }
  ctx.below("endpoint_err", endpoint, 1e-9);
  ctx.below("junction_mismatch", junction, 1e-4);
  ctx.below("group_residual", group, 1e-9);
  ctx.below("quasi_periodicity_err", quasi, 1e-9);
}

void sections_quotient(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double res = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const Eigen::Index n = rng.integer(2, 4);
    try {
      if (trial % 2 == 0) {
        const Matrix g = rng.unitary(n);
        const auto a = un_section(rng.uniform(-kPi, kPi), g);
        const auto b = un_section(rng.uniform(-kPi, kPi), g);
        res = std::max(res, path_fiber_quotient(a, b).residual);
      } else {
        const RealMatrix g = rng.special_orthogonal(n);
        const RealMatrix h = (g.cast<cplx>() * rng.real_skew(n, 0.2).exp()).real();
        const auto a = so_section(rng.uniform(-0.9, 0.9), g, h);
        const auto b = PathElement::eta(Group::U, central_log(h.cast<cplx>()));
        res = std::max(res, path_fiber_quotient(a, b).residual);
      }
    } catch (const RejectedInput&) {
      ctx.reject();
    }
  }
  ctx.below("poly_residual", res, 1e-8);
}

// ---------------------------------------------------------------- holonomy

void holonomy_transport(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double brk = 0.0, loop = 0.0, doubling = 0.0, orth = 0.0;
  for (ModelKind m : {ModelKind::torus, ModelKind::sphere, ModelKind::su2}) {
    const ConnectionModel model(m);
    for (int trial = 0; trial < ctx.trials(); ++trial) {
      const BaseLoop l = random_loop_for(rng, m);
      const double s = rng.uniform(0.05, 0.95);
      const auto full = transport(model, l, 0.0, 1.0);
      const auto a = transport(model, l, 0.0, s);
      const auto b = transport(model, l, s, 1.0);
      brk = std::max(brk, (b.value * a.value - full.value).norm());
      const double t0 = rng.uniform(0.0, 1.0), t1 = rng.uniform(0.0, 1.0);
      loop = std::max(loop, (transport(model, l, t0 + 1.0, t1 + 1.0).value - transport(model, l, t0, t1).value).norm());
      doubling = std::max(doubling, full.doubling_error);
      const auto nn = model.rank();
      orth = std::max(orth, (full.value.adjoint() * full.value - Matrix::Identity(nn, nn)).norm());
    }
  }
  ctx.result().trials = 3 * ctx.trials();
  ctx.below("composition_err", brk, 1e-8);
  ctx.below("period_shift_err", loop, 1e-8);
  ctx.below("doubling_err", doubling, 1e-8);
  ctx.below("orthogonality_err", orth, 1e-8);
}

void holonomy_latitude(PropertyContext& ctx) {
  double angle = 0.0, expo = 0.0, frame = 0.0;
  const ConnectionModel model(ModelKind::sphere);
  for (double theta : {kPi / 6, kPi / 3, kPi / 2, 2 * kPi / 3}) {
    const auto loop = BaseLoop::latitude(theta);
    const auto data = monodromy(model, loop);
    const double expected = reference::latitude_angle(theta, 1);
    const double got = reference::rotation_angle(data.holonomy.real());
    angle = std::max(angle, std::abs(std::remainder(got - expected, kTwoPi)));
    for (double s : data.exponents) {
      const double e = expected / kTwoPi;
      const double d = std::min(std::abs(std::remainder(s - e, 1.0)), std::abs(std::remainder(s + e, 1.0)));
      expo = std::max(expo, d);
    }
    for (int i = 0; i <= data.grid(); i += 64)
      frame = std::max(frame, (data.transported[i].real() - reference::latitude_frame(theta, 1, double(i) / data.grid())).norm());
  }
  ctx.below("angle_err", angle, 1e-6);
  ctx.below("exponent_err", expo, 1e-6);
  ctx.below("frame_err", frame, 1e-8);
}

void holonomy_fibre_basis(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double gram = 0.0, dhat = 0.0, fourier = 0.0, quad = 0.0;
  for (ModelKind m : {ModelKind::torus, ModelKind::sphere, ModelKind::su2}) {
    const ConnectionModel model(m);
    for (int trial = 0; trial < ctx.trials(); ++trial) {
      const BaseLoop l = trial == 0 ? BaseLoop::latitude(kPi / 3) : random_loop_for(rng, m);
      const auto data = monodromy(model, l);
      const auto basis = eigen_sections(data, 8);
      gram = std::max(gram, gram_error(basis));
      dhat = std::max(dhat, d_hat_residual(model, l, basis));
      if (m == ModelKind::torus) {
        for (Eigen::Index k = 0; k < basis.size(); ++k) {
          const auto [p, j] = basis.labels[k];
          for (Eigen::Index i = 0; i < basis.sections[k].cols(); ++i) {
            Vector e = Vector::Zero(2);
            e(j) = std::polar(1.0, kTwoPi * p * (static_cast<double>(i) / data.grid()));
            fourier = std::max(fourier, (basis.sections[k].col(i) - e).cwiseAbs().maxCoeff());
          }
        }
      }
    }
  }
  // Latitude sections from the closed-form frame on a 4x finer grid.
  const double theta = kPi / 3;
  const auto data = monodromy(ConnectionModel(ModelKind::sphere), BaseLoop::latitude(theta));
  const int fine = 4 * kDefaultGrid;
  std::vector<Matrix> secs;
  for (int p = -8; p <= 8; ++p)
    for (Eigen::Index j = 0; j < 2; ++j) {
      Matrix s(2, fine);
      for (int i = 0; i < fine; ++i) {
        const double t = static_cast<double>(i) / fine;
        s.col(i) = std::polar(1.0, kTwoPi * (p - data.exponents[j]) * t) *
                   (reference::latitude_frame(theta, 1, t).cast<cplx>() * data.frame.col(j));
      }
      secs.push_back(s);
    }
  for (size_t a = 0; a < secs.size(); ++a)
    for (size_t b = 0; b < secs.size(); ++b)
      quad = std::max(quad, std::abs(l2_pairing(secs[a], secs[b]) - (a == b ? 1.0 : 0.0)));
  ctx.below("gram_err", gram, 1e-8);
  ctx.below("d_hat_residual", dhat, 1e-6);
  ctx.below("torus_fourier_err", fourier, 1e-15);
  ctx.below("quadrature_gram_err", quad, 1e-8);
}

void holonomy_cos_inner(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double torus = 0.0, herm = 0.0, mineig = INFINITY, cont = 0.0;
  const auto tdata = monodromy(ConnectionModel(ModelKind::torus), BaseLoop{});
  for (int p = -8; p <= 8; ++p)
    for (double r : {1.5, 2.0, 3.0}) {
      const auto basis = eigen_sections(tdata, 8);
      const auto c = project_section(basis.sections[basis.index(p, 0)], basis);
      const double expected = std::pow(std::cosh(p * std::log(r)), 2);
      torus = std::max(torus, std::abs(cos_inner_product(c, c, basis.exponents, r).real() - expected) / expected);
    }
  {
    const auto basis = eigen_sections(tdata, 1);
    const auto c = project_section(basis.sections[basis.index(1, 0)], basis);
    torus = std::max(torus, std::abs(cos_inner_product(c, c, basis.exponents, 2.0).real() - 1.5625));
  }
  for (ModelKind m : {ModelKind::torus, ModelKind::sphere, ModelKind::su2}) {
    const auto data = monodromy(ConnectionModel(m), random_loop_for(rng, m));
    for (int bound : {2, 4, 8})
      for (double r : {1.5, 2.0, 3.0}) {
        const auto basis = eigen_sections(data, bound);
        const Matrix g = cos_gram(basis, r);
        herm = std::max(herm, (g - g.adjoint()).norm() / g.norm());
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.adjoint()));
        mineig = std::min(mineig, es.eigenvalues().minCoeff());
      }
    const auto basis = eigen_sections(data, 4);
    for (int trial = 0; trial < 4; ++trial) {
      Matrix a = Matrix::Zero(basis.dim, data.grid()), b = a;
      for (Eigen::Index k = 0; k < basis.size(); ++k) {
        const cplx ca(rng.normal(), rng.normal()), cb(rng.normal(), rng.normal());
        a += ca * basis.sections[k];
        b += cb * basis.sections[k];
      }
      const auto pa = project_section(a, basis), pb = project_section(b, basis);
      cont = std::max(cont, std::abs(cos_inner_product(pa, pb, basis.exponents, 1.0 + 1e-9) - l2_pairing(a, b)) /
                                std::max(1.0, std::abs(l2_pairing(a, b))));
    }
  }
  ctx.below("torus_pairing_err", torus, 1e-10);
  ctx.below("hermitian_err", herm, 1e-12);
  ctx.above("min_gram_eigenvalue", mineig, 0.0);
  ctx.below("r_to_one_err", cont, 1e-6);
}

void holonomy_loop_recognition(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double err = 0.0;
  const ConnectionModel model(ModelKind::sphere);
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const BaseLoop l = random_sphere_loop(rng);
    const auto data = monodromy(model, l);
    const auto basis = eigen_sections(data, 3);
    Matrix alpha = Matrix::Zero(2, data.grid());
    for (Eigen::Index k = 0; k < basis.size(); ++k) alpha += cplx(rng.normal(), rng.normal()) * basis.sections[k];
    for (int s = 0; s < 8; ++s) {
      const int i = rng.integer(0, data.grid() - 1);
      const double t = static_cast<double>(i) / data.grid();
      const Matrix phi_t = transport(model, l, 0.0, t).value;
      const Matrix phi_t1 = transport(model, l, 0.0, t + 1.0, 2 * kDefaultGrid * 4).value;
      const Vector x_t = phi_t.inverse() * alpha.col(i);
      const Vector x_t1 = phi_t1.inverse() * alpha.col(i);
      err = std::max(err, (data.holonomy * x_t1 - x_t).norm() / std::max(1.0, x_t.norm()));
    }
  }
  ctx.below("recognition_err", err, 1e-8);
}

void holonomy_direct_sum(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double cross = 0.0, span = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const BaseLoop l = random_sphere_loop(rng);
    const auto whole = eigen_sections(monodromy(ConnectionModel(ModelKind::torus_sphere), l), 3);
    const auto torus = eigen_sections(monodromy(ConnectionModel(ModelKind::torus), l), 3);
    const auto sphere = eigen_sections(monodromy(ConnectionModel(ModelKind::sphere), l), 3);
    const int grid = static_cast<int>(whole.sections.front().cols());
    std::vector<Matrix> blocks;
    for (const auto& s : torus.sections) {
      Matrix e = Matrix::Zero(4, grid);
      e.topRows(2) = s;
      blocks.push_back(e);
    }
    for (const auto& s : sphere.sections) {
      Matrix e = Matrix::Zero(4, grid);
      e.bottomRows(2) = s;
      blocks.push_back(e);
    }
    const size_t nt = torus.sections.size();
    for (size_t a = 0; a < nt; ++a)
      for (size_t b = nt; b < blocks.size(); ++b) cross = std::max(cross, std::abs(l2_pairing(blocks[a], blocks[b])));
    Matrix u(4 * grid, static_cast<Eigen::Index>(blocks.size()));
    for (size_t k = 0; k < blocks.size(); ++k) u.col(k) = blocks[k].reshaped() / std::sqrt(double(grid));
    std::vector<Eigen::Index> all(static_cast<size_t>(whole.size()));
    for (Eigen::Index k = 0; k < whole.size(); ++k) all[k] = k;
    const Matrix w = stacked(whole, all) / std::sqrt(double(grid));
    span = std::max({span, span_residual(w, u), span_residual(u, w)});
  }
  ctx.below("cross_gram", cross, 1e-8);
  ctx.below("span_err", span, 1e-8);
}

void holonomy_complexification(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double err = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const BaseLoop l = random_sphere_loop(rng);
    const auto data = monodromy(ConnectionModel(ModelKind::sphere), l);
    const auto basis = eigen_sections(data, 6);
    const double cutoff = 4.0;
    std::vector<Eigen::Index> pick;
    for (Eigen::Index k = 0; k < basis.size(); ++k) {
      const auto [p, j] = basis.labels[k];
      if (std::abs(p - basis.exponents[j]) <= cutoff + 1e-9) pick.push_back(k);
    }
    const double scale = 1.0 / std::sqrt(double(data.grid()));
    const Matrix complex_span = stacked(basis, pick) * scale;
    Matrix real_parts(complex_span.rows(), 2 * complex_span.cols());
    real_parts << complex_span.real().cast<cplx>(), complex_span.imag().cast<cplx>();
    // Real and imaginary parts of a conjugation-closed span reproduce it.
    Eigen::JacobiSVD<Matrix> svd(real_parts, Eigen::ComputeThinU);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-6 * svd.singularValues()(0)) ++rank;
    const Matrix realified = svd.matrixU().leftCols(rank);
    err = std::max({err, span_residual(complex_span, realified), span_residual(realified, complex_span),
                    std::abs(double(rank - complex_span.cols()))});
  }
  ctx.below("span_err", err, 1e-8);
}

void holonomy_rotation_invariance(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double err = 0.0;
  const ConnectionModel model(ModelKind::sphere);
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const BaseLoop l = random_sphere_loop(rng);
    Reparam rot;
    rot.shift = rng.uniform(0.0, 1.0);
    const auto a = floquet(holonomy(model, l).value);
    const auto b = floquet(holonomy(model, l, kDefaultSteps, rot).value);
    for (size_t j = 0; j < a.exponents.size(); ++j)
      err = std::max(err, std::abs(std::remainder(a.exponents[j] - b.exponents[j], 1.0)));
  }
  ctx.below("exponent_err", err, 1e-8);
}

void holonomy_reparam(PropertyContext& ctx) {
  double rigid = 0.0, generic = INFINITY, periodic = 0.0, drift = 0.0;
  for (ModelKind m : {ModelKind::torus, ModelKind::sphere}) {
    const ConnectionModel model(m);
    const auto loop = BaseLoop::latitude(kPi / 3);
    Reparam rot;
    rot.shift = 0.3;
    Reparam refl;
    refl.orientation = -1;
    refl.shift = 0.2;
    Reparam wobble;
    wobble.amplitude = 0.1;
    for (const auto& s : {rot, refl}) {
      const auto r = reparam_actions(model, loop, s, 4);
      rigid = std::max(rigid, r.standard_residual);
      periodic = std::max(periodic, r.transport_periodicity);
      drift = std::max(drift, r.coefficient_drift);
    }
    const auto r = reparam_actions(model, loop, wobble, 4);
    generic = std::min(generic, r.standard_residual);
    periodic = std::max(periodic, r.transport_periodicity);
    drift = std::max(drift, r.coefficient_drift);
  }
  ctx.below("rigid_residual", rigid, 1e-8);
  ctx.above("generic_residual", generic, 1e-3);
  ctx.below("transport_periodicity", periodic, 1e-8);
  ctx.below("coefficient_drift", drift, 1e-12);
}

void holonomy_condiff(PropertyContext& ctx) {
  auto& rng = ctx.rng();
  double ident = 0.0, rot = 0.0, wob = 0.0;
  for (int trial = 0; trial < ctx.trials(); ++trial) {
    const ModelKind m = trial % 2 == 0 ? ModelKind::sphere : ModelKind::su2;
    const ConnectionModel model(m);
    const BaseLoop l = trial < 2 ? BaseLoop::latitude(kPi / 3) : random_loop_for(rng, m);
    const auto n = model.rank();
    std::vector<std::pair<int, Vector>> modes;
    for (int p = -3; p <= 3; ++p) modes.emplace_back(p, rng.gaussian(n, 1));
    const SectionFunction alpha = [modes, n](double t) {
      Vector v = Vector::Zero(n);
      for (const auto& [p, c] : modes) v += std::polar(1.0, kTwoPi * p * t) * c;
      return v;
    };
    ident = std::max(ident, condiff_residual(model, l, Reparam{}, alpha));
    Reparam r;
    r.shift = rng.uniform(0.0, 1.0);
    rot = std::max(rot, condiff_residual(model, l, r, alpha));
    Reparam w;
    w.amplitude = 0.1;
    wob = std::max(wob, condiff_residual(model, l, w, alpha));
  }
  ctx.below("identity_residual", ident, 1e-8);
  ctx.below("rotation_residual", rot, 1e-6);
  ctx.below("wobble_residual", wob, 1e-4);
}

void holonomy_counterexample(PropertyContext& ctx) {
  const auto linear = [](double t) { return t; };
  const auto bent = [](double t) { return t + 0.3 * std::sin(kTwoPi * t); };
  const auto one = MatrixLoop::constant(Matrix::Identity(1, 1));
  const auto z2 = MatrixLoop::monomial(2, Matrix::Identity(1, 1));
  const auto lin = subbundle_counterexample(linear, one);
  const auto a = subbundle_counterexample(bent, one);
  const auto b = subbundle_counterexample(bent, z2);
  const double oracle_a = reference::jacobi_anger_tail(kTwoPi * 0.3, 1, a.degree);
  const double oracle_b = reference::jacobi_anger_tail(kTwoPi * 0.3, 3, b.degree);
  ctx.below("linear_residual", lin.residual, 1e-10);
  ctx.above("beta_one_residual", a.residual, 1e-3);
  ctx.above("beta_z2_residual", b.residual, 1e-3);
  ctx.below("oracle_err", std::max(std::abs(a.residual - oracle_a), std::abs(b.residual - oracle_b)), 1e-10);
}

}  // namespace

bool Metric::pass() const { return direction == Direction::below ? value < threshold : value > threshold; }

bool PropertyResult::pass() const {
  if (!error.empty() || !failures.empty()) return false;
  return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass(); });
}

PropertyContext::PropertyContext(const SuiteConfig& config, const std::string& property, int default_trials)
    : config_(config),
      rng_(config.seed ^ fnv1a(property)),
      trials_(config.trials > 0 ? config.trials : default_trials) {
  result_.name = property;
  result_.trials = trials_;
}

void PropertyContext::add(const std::string& name, double value, double threshold, Metric::Direction d) {
  const std::string full = result_.name + "." + name;
  auto it = config_.tolerances.find(full);
  if (it != config_.tolerances.end()) threshold = it->second;
  result_.metrics.push_back({full, value, threshold, d});
}

void PropertyContext::below(const std::string& name, double value, double threshold) {
  add(name, value, threshold, Metric::Direction::below);
}

void PropertyContext::above(const std::string& name, double value, double threshold) {
  add(name, value, threshold, Metric::Direction::above);
}

const std::vector<Property>& property_registry() {
  static const std::vector<Property> registry = {
      {"laurent.eval_homomorphism", "laurent_core", 50, laurent_eval_homomorphism},
      {"laurent.fft_projection", "laurent_core", 50, laurent_fft_projection},
      {"laurent.group_membership", "laurent_core", 30, laurent_group_membership},
      {"seq.cosh_inequality", "sequence_spaces", 1, seq_cosh_inequality},
      {"seq.cos_r_isomorphism", "sequence_spaces", 500, seq_cos_r_isomorphism},
      {"seq.intertwining", "sequence_spaces", 20, seq_intertwining},
      {"seq.unitary_action", "sequence_spaces", 50, seq_unitary_action},
      {"seq.hs_closed_form", "sequence_spaces", 100, seq_hs_closed_form},
      {"seq.conjugated_hs", "sequence_spaces", 20, seq_conjugated_hs},
      {"spectral.exp_log_branch", "spectral_lie", 200, spectral_exp_log},
      {"spectral.exp_oracle", "spectral_lie", 100, spectral_exp_oracle},
      {"spectral.eta_pair_loop", "spectral_lie", 200, spectral_eta_pair},
      {"spectral.central_log", "spectral_lie", 100, spectral_central_log},
      {"spectral.exp_pi_j", "spectral_lie", 50, spectral_exp_pi_j},
      {"spectral.structure_pairs", "spectral_lie", 50, spectral_structure_pairs},
      {"spectral.unitary_structure", "spectral_lie", 50, spectral_unitary_structure},
      {"spectral.log0_decompose", "spectral_lie", 50, spectral_log0},
      {"spectral.centraliser_torus", "spectral_lie", 50, spectral_centraliser_torus},
      {"sections.U", "path_sections", 200, [](PropertyContext& c) { run_sweeps(c, Group::U); }},
      {"sections.SU", "path_sections", 200, [](PropertyContext& c) { run_sweeps(c, Group::SU); }},
      {"sections.SO", "path_sections", 200, [](PropertyContext& c) { run_sweeps(c, Group::SO); }},
      {"sections.actions", "path_sections", 50, sections_actions},
      {"sections.smooth", "path_sections", 30, sections_smooth},
      {"sections.fiber_quotient", "path_sections", 40, sections_quotient},
      {"holonomy.transport", "holonomy_floquet", 50, holonomy_transport},
      {"holonomy.latitude", "holonomy_floquet", 1, holonomy_latitude},
      {"holonomy.fibre_basis", "holonomy_floquet", 3, holonomy_fibre_basis},
      {"holonomy.cos_inner_product", "holonomy_floquet", 1, holonomy_cos_inner},
      {"holonomy.loop_recognition", "holonomy_floquet", 5, holonomy_loop_recognition},
      {"holonomy.direct_sum", "holonomy_floquet", 3, holonomy_direct_sum},
      {"holonomy.complexification", "holonomy_floquet", 3, holonomy_complexification},
      {"holonomy.rotation_invariance", "holonomy_floquet", 20, holonomy_rotation_invariance},
      {"holonomy.reparam", "holonomy_floquet", 1, holonomy_reparam},
      {"holonomy.condiff", "holonomy_floquet", 6, holonomy_condiff},
      {"holonomy.counterexample", "holonomy_floquet", 1, holonomy_counterexample},
  };
  return registry;
}

PropertyResult run_property(const Property& p, const SuiteConfig& config) {
  PropertyContext ctx(config, p.name, p.default_trials);
  ctx.result().module = p.module;
  try {
    p.run(ctx);
  } catch (const std::exception& e) {
    ctx.result().error = e.what();
  }
  return ctx.result();
}

void to_json(nlohmann::json& j, const PropertyResult& r) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& m : r.metrics)
    metrics.push_back({{"name", m.name},
                       {"value", m.value},
                       {"threshold", m.threshold},
                       {"direction", m.direction == Metric::Direction::below ? "below" : "above"},
                       {"pass", m.pass()}});
  j = {{"name", r.name},         {"module", r.module},     {"trials", r.trials}, {"rejections", r.rejections},
       {"metrics", metrics},     {"failures", r.failures}, {"pass", r.pass()}};
  if (!r.error.empty()) j["error"] = r.error;
}

nlohmann::json run_suite(const SuiteConfig& config, bool& all_pass,
                         const std::function<void(const PropertyResult&)>& on_result) {
  nlohmann::json props = nlohmann::json::array();
  all_pass = true;
  int count = 0;
  for (const auto& p : property_registry()) {
    if (config.only && p.name.rfind(*config.only, 0) != 0) continue;
    const auto r = run_property(p, config);
    if (on_result) on_result(r);
    all_pass = all_pass && r.pass();
    props.push_back(r);
    ++count;
  }
  if (count == 0) all_pass = false;
  return {{"schema", 1},
          {"seed", config.seed},
          {"trials_override", config.trials},
          {"property_count", count},
          {"pass", all_pass},
          {"properties", props}};
}

}  // namespace polyloop
