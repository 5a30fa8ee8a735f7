#include <doctest.h>

#include "polyloop/errors.hpp"
#include "polyloop/laurent.hpp"
#include "polyloop/reference.hpp"

using namespace polyloop;

namespace {

Matrix one() { return Matrix::Identity(1, 1); }

Matrix diag2(cplx a, cplx b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

MatrixLoop diag_z_zinv() {
  return MatrixLoop::from_coeffs({{1, diag2(1.0, 0.0)}, {-1, diag2(0.0, 1.0)}});
}

}  // namespace

TEST_CASE("laurent_mul") {
  const auto z = MatrixLoop::monomial(1, one());
  const auto zi = MatrixLoop::monomial(-1, one());
  const auto p = z * zi;
  CHECK(p.coeffs().size() == 1);
  CHECK(std::abs(p.coeff(0)(0, 0) - 1.0) < 1e-15);

  const auto a = MatrixLoop::from_coeffs({{0, one()}, {1, one()}});
  const auto sq = a * a;
  CHECK(std::abs(sq.coeff(0)(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(sq.coeff(1)(0, 0) - 2.0) < 1e-15);
  CHECK(std::abs(sq.coeff(2)(0, 0) - 1.0) < 1e-15);

  const auto b = MatrixLoop::from_coeffs({{-2, Matrix::Constant(2, 2, cplx(1, 2))}, {3, Matrix::Constant(2, 2, 0.5)}});
  const auto c = b * MatrixLoop::identity(2);
  for (int k = -2; k <= 3; ++k) CHECK((c.coeff(k) - b.coeff(k)).norm() == 0.0);

  CHECK_THROWS_AS(MatrixLoop::identity(2) * MatrixLoop::identity(3), RejectedInput);
}

TEST_CASE("laurent_eval") {
  const auto z = MatrixLoop::monomial(1, one());
  CHECK(std::abs(laurent_eval(z, 0.25)(0, 0) - cplx(0, 1)) < 1e-15);

  const auto c = MatrixLoop::from_coeffs({{1, 0.5 * one()}, {-1, 0.5 * one()}}, Field::real);
  for (double t : {0.0, 0.1, 0.37, 0.8}) CHECK(std::abs(laurent_eval(c, t)(0, 0) - std::cos(kTwoPi * t)) < 1e-15);

  CHECK((laurent_eval(diag_z_zinv(), 0.5) + Matrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("group_residual") {
  CHECK(group_residual(diag_z_zinv(), Group::SU) < 1e-12);
  const auto a = MatrixLoop::from_coeffs({{0, one()}, {1, one()}});
  CHECK(matrix_group_residual(laurent_eval(a, 0.5), Group::U) >= 1.0);
  Matrix rot(2, 2);
  rot << std::cos(0.7), -std::sin(0.7), std::sin(0.7), std::cos(0.7);
  CHECK(group_residual(MatrixLoop::constant(rot, Field::real), Group::SO) < 1e-14);
}

TEST_CASE("real loops must be conjugate symmetric") {
  CHECK_THROWS_AS(MatrixLoop::from_coeffs({{1, one()}}, Field::real), RejectedInput);
}

TEST_CASE("fourier_project") {
  const auto z2 = SampledLoop::sample(MatrixLoop::monomial(2, one()));
  const auto proj = fourier_project(z2, 4);
  CHECK(std::abs(proj.loop.coeff(2)(0, 0) - 1.0) < 1e-12);
  CHECK(polynomiality_residual(z2, 4) < 1e-12);

  const auto c = SampledLoop::sample(MatrixLoop::constant(Matrix::Constant(1, 1, cplx(0.3, -2.0))));
  const auto pc = fourier_project(c, 3);
  CHECK(std::abs(pc.loop.coeff(0)(0, 0) - cplx(0.3, -2.0)) < 1e-15);
  for (int k = 1; k <= 3; ++k) CHECK(pc.loop.coeff(k).norm() + pc.loop.coeff(-k).norm() < 1e-15);
  CHECK(pc.residual < 1e-15);

  CHECK_THROWS_AS(fourier_project(c, kDefaultGrid / 2), RejectedInput);
}

TEST_CASE("fourier_project against the modified Bessel expansion") {
  // exp(c sin 2 pi t) has |c_k| = I_k(c); the tail beyond degree 4 at c = 0.2
  // is about 1.18e-7 of absolute mass.
  const auto s = SampledLoop::sample([](double t) { return Matrix::Constant(1, 1, std::exp(0.2 * std::sin(kTwoPi * t))); }, 1, 1);
  const auto p = fourier_project(s, 4);
  CHECK(p.residual == doctest::Approx(reference::modified_bessel_tail(0.2, 4)).epsilon(1e-6));
  CHECK(p.residual == doctest::Approx(1.1806e-7).epsilon(1e-3));
  CHECK(polynomiality_residual(s, 4) == doctest::Approx(1.1575e-7).epsilon(1e-3));
  CHECK(polynomiality_residual(s, 1) > 1e-3);
}

TEST_CASE("polynomiality_residual") {
  const Matrix xi = diag2(cplx(0, 0.4), cplx(0, -1.3));
  const auto s = SampledLoop::sample([&](double t) -> Matrix {
    Matrix e = (-t * xi).diagonal().array().exp().matrix().asDiagonal();
    Matrix f = (t * xi).diagonal().array().exp().matrix().asDiagonal();
    return e * f;
  }, 2, 2);
  CHECK(polynomiality_residual(s, 0) < 1e-14);

  const auto d = SampledLoop::sample(MatrixLoop::from_coeffs({{3, diag2(1.0, 0.0)}, {0, diag2(0.0, 1.0)}}));
  CHECK(polynomiality_residual(d, 3) < 1e-10);

  // Jacobi-Anger: the tail at degree 8 is of order 2e-9, at degree 2 about 5e-2.
  const auto f = [](double t) { return Matrix::Constant(1, 1, std::polar(1.0, kTwoPi * (t + 0.1 * std::sin(kTwoPi * t)))); };
  const auto w = SampledLoop::sample(f, 1, 1);
  CHECK(polynomiality_residual(w, 8) == doctest::Approx(reference::jacobi_anger_tail(kTwoPi * 0.1, 1, 8)).epsilon(1e-4));
  CHECK(polynomiality_residual(w, 8) == doctest::Approx(2.329e-9).epsilon(1e-3));
  CHECK(polynomiality_residual(w, 2) > 1e-3);
  CHECK(polynomiality_residual(w, 3) > 1e-3);

  CHECK_THROWS_AS(polynomiality_residual(w, kDefaultGrid / 4), RejectedInput);
}

TEST_CASE("loop json round trip") {
  const auto a = MatrixLoop::from_coeffs({{-1, Matrix::Constant(2, 3, cplx(1, -1))}, {2, Matrix::Constant(2, 3, 0.25)}});
  nlohmann::json j = a;
  const auto b = matrix_loop_from_json(j);
  CHECK(b.rows() == 2);
  CHECK(b.cols() == 3);
  for (int k = -1; k <= 2; ++k) CHECK((b.coeff(k) - a.coeff(k)).norm() == 0.0);
}
