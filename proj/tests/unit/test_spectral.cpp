#include <doctest.h>

#include "polyloop/errors.hpp"
#include "polyloop/random.hpp"
#include "polyloop/reference.hpp"
#include "polyloop/spectral.hpp"

using namespace polyloop;

namespace {

Matrix diag(std::initializer_list<cplx> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (cplx x : d) v(i++) = x;
  return v.asDiagonal();
}

RealMatrix rotation(double phi) {
  RealMatrix r(2, 2);
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

RealMatrix j0() { return standard_unitary_structure(2); }

}  // namespace

TEST_CASE("log_branch") {
  CHECK((log_branch(diag({cplx(0, 1)}), 0.0).matrix() - diag({cplx(0, kPi / 2)})).norm() < 1e-14);
  CHECK((log_branch(diag({-1.0}), kPi).matrix() - diag({cplx(0, kPi)})).norm() < 1e-14);
  try {
    log_branch(diag({-1.0}), 0.0);
    FAIL("expected a branch cut error");
  } catch (const BranchCutError& e) {
    CHECK(std::abs(e.eigenvalue() + 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(log_branch(Matrix::Constant(2, 2, 1.0), 0.0), RejectedInput);
}

TEST_CASE("exp_skew") {
  CHECK((exp_skew(SkewMatrix::zero(3)) - Matrix::Identity(3, 3)).norm() == 0.0);
  CHECK((exp_skew(SkewMatrix(diag({cplx(0, kTwoPi)}))) - Matrix::Identity(1, 1)).norm() < 1e-14);
  const auto e = exp_skew(SkewMatrix::real(kPi / 2 * j0()));
  CHECK((e.real() - rotation(kPi / 2)).norm() < 1e-14);
  CHECK(e.imag().norm() == 0.0);
}

TEST_CASE("central_log") {
  CHECK(central_log(Matrix::Identity(3, 3)).matrix().norm() < 1e-15);
  const auto zeta = central_log(diag({cplx(0, 1), cplx(0, 1)}));
  CHECK((zeta.matrix() - diag({cplx(0, kPi / 2), cplx(0, kPi / 2)})).norm() < 1e-14);

  Rng rng(7);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Matrix u = rng.unitary(2);
    const Matrix other = u * diag({cplx(0, kPi / 2 + kTwoPi * rng.integer(-3, 3)), cplx(0, kPi / 2 + kTwoPi * rng.integer(-3, 3))}) * u.adjoint();
    CHECK((reference::pade_exp(other) - diag({cplx(0, 1), cplx(0, 1)})).norm() < 1e-9);
    worst = std::max(worst, (zeta.matrix() * other - other * zeta.matrix()).norm());
  }
  CHECK(worst < 1e-9);

  const auto z1 = central_log(diag({std::polar(1.0, 1.0), std::polar(1.0, -1.0)}));
  CHECK((z1.matrix() - diag({cplx(0, 1), cplx(0, -1)})).norm() < 1e-14);
  CHECK((central_log(diag({-1.0})).matrix() - diag({cplx(0, -kPi)})).norm() < 1e-14);
}

TEST_CASE("eta_pair_loop") {
  const auto pl = eta_pair_loop(SkewMatrix(diag({cplx(0, kTwoPi), 0.0})), SkewMatrix::zero(2));
  CHECK(pl.residual < 1e-10);
  CHECK((pl.loop.coeff(-1) - diag({1.0, 0.0})).norm() < 1e-12);
  CHECK((pl.loop.coeff(0) - diag({0.0, 1.0})).norm() < 1e-12);

  Rng rng(3);
  const auto xi = rng.skew(3, 2.0);
  const auto same = eta_pair_loop(xi, xi);
  CHECK(same.residual < 1e-12);
  CHECK((same.loop.coeff(0) - Matrix::Identity(3, 3)).norm() < 1e-12);

  const auto g = rng.unitary(3);
  const auto z = central_log(g);
  const Matrix p = z.eigenvectors().col(1) * z.eigenvectors().col(1).adjoint();
  const auto shifted = eta_pair_loop(SkewMatrix(Matrix(z.matrix() + cplx(0, kTwoPi) * p), 1e-9), z);
  CHECK(shifted.residual < 1e-8);
  CHECK((shifted.loop.coeff(-1) - p).norm() < 1e-9);

  CHECK_THROWS_AS(eta_pair_loop(SkewMatrix(diag({cplx(0, 1.0)})), SkewMatrix::zero(1)), RejectedInput);
}

TEST_CASE("unitary_structure") {
  for (double a : {0.1, 1.0, 7.0}) CHECK((unitary_structure(SkewMatrix::real(a * j0())) - j0()).norm() < 1e-12);
  CHECK((unitary_structure(SkewMatrix::real(-2.0 * j0())) + j0()).norm() < 1e-12);
  CHECK_THROWS_AS(unitary_structure(SkewMatrix::zero(2)), RejectedInput);
  CHECK_THROWS_AS(unitary_structure(SkewMatrix::zero(3)), RejectedInput);
}

TEST_CASE("log0_decompose") {
  for (double phi : {0.3, 1.5, 2.9}) {
    const auto d = log0_decompose(rotation(phi));
    CHECK((d.xi.real_matrix() - phi * j0()).norm() < 1e-12);
    CHECK((d.J - j0()).norm() < 1e-12);
  }
  const auto m = log0_decompose(-RealMatrix::Identity(2, 2));
  CHECK((m.xi.real_matrix() - kPi * j0()).norm() < 1e-12);
  CHECK((m.J - j0()).norm() < 1e-12);

  RealMatrix g = RealMatrix::Zero(4, 4);
  g.topLeftCorner(2, 2) = rotation(0.4);
  g.bottomRightCorner(2, 2) = rotation(2.2);
  const auto b = log0_decompose(g);
  RealMatrix expected = RealMatrix::Zero(4, 4);
  expected.topLeftCorner(2, 2) = 0.4 * j0();
  expected.bottomRightCorner(2, 2) = 2.2 * j0();
  CHECK((b.xi.real_matrix() - expected).norm() < 1e-12);
  CHECK((b.J - standard_unitary_structure(4)).norm() < 1e-12);

  CHECK_THROWS_AS(log0_decompose(RealMatrix::Identity(2, 2)), RejectedInput);
  CHECK_THROWS_AS(log0_decompose(RealMatrix::Identity(3, 3)), RejectedInput);
  CHECK_THROWS_AS(log0_decompose(2.0 * RealMatrix::Identity(2, 2)), RejectedInput);
}

TEST_CASE("minus_one_eigenspace depends only on the subspace") {
  Rng rng(11);
  const RealMatrix o = rng.special_orthogonal(4);
  RealMatrix d = -RealMatrix::Identity(4, 4);
  d.bottomRightCorner(2, 2) = rotation(1.0);
  const RealMatrix g = o * d * o.transpose();
  const RealMatrix b = minus_one_eigenspace(g);
  CHECK(b.cols() == 2);
  CHECK((g * b + b).norm() < 1e-12);
  CHECK((b.transpose() * b - RealMatrix::Identity(2, 2)).norm() < 1e-12);
  const RealMatrix p = b * b.transpose();
  CHECK((subspace_basis(p, 2) - b).norm() < 1e-12);
}
