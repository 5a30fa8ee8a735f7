#include <doctest.h>

#include "polyloop/errors.hpp"
#include "polyloop/reference.hpp"
#include "polyloop/sequence_spaces.hpp"

using namespace polyloop;

namespace {

Matrix one() { return Matrix::Identity(1, 1); }

double mode_err(const LoopVector& v, int p, Eigen::Index j, cplx expected) {
  double err = std::abs(v.mode(p)(j) - expected);
  LoopVector rest = v;
  rest.mode(p)(j) = 0.0;
  return err + rest.coeffs().norm();
}

}  // namespace

TEST_CASE("norms") {
  const auto e0 = LoopVector::basis(1, 2, 0, 0);
  CHECK(l2_norm(e0) == doctest::Approx(1.0));
  CHECK(l2r_norm(e0, 3.0) == doctest::Approx(1.0));
  CHECK(l2r_norm(LoopVector::basis(1, 2, 2, 0), 2.0) == doctest::Approx(4.0));
  LoopVector v(2, 1);
  v.mode(1)(0) = 1.0;
  v.mode(-1)(0) = 1.0;
  CHECK(l2r_norm(v, 3.0) == doctest::Approx(3.0 * std::sqrt(2.0)));
  CHECK_THROWS_AS(l2r_norm(v, 1.0), RejectedInput);
}

TEST_CASE("D_s") {
  const auto s0 = ShiftData::standard(1);
  CHECK(mode_err(apply_D_s(LoopVector::basis(1, 3, 1, 0), s0), 1, 0, cplx(0, 1)) < 1e-15);
  CHECK(apply_D_s(LoopVector::basis(1, 3, 0, 0), s0).coeffs().norm() == 0.0);
  CHECK(mode_err(apply_D_s(LoopVector::basis(1, 3, 2, 0), ShiftData::standard(1, 0.5)), 2, 0, cplx(0, 2.5)) < 1e-15);
  Matrix bad(2, 2);
  bad << 1, 1, 0, 1;
  CHECK_THROWS_AS(ShiftData(bad, {0.0, 0.0}), RejectedInput);
}

TEST_CASE("cos_r") {
  const auto s0 = ShiftData::standard(1);
  CHECK(mode_err(apply_cos_r(LoopVector::basis(1, 3, 1, 0), s0, 2.0), 1, 0, 1.25) < 1e-15);
  CHECK(mode_err(apply_cos_r(LoopVector::basis(1, 3, 0, 0), s0, 7.0), 0, 0, 1.0) < 1e-15);
  CHECK(mode_err(apply_cos_r(LoopVector::basis(1, 3, -2, 0), s0, 2.0), -2, 0, 2.125) < 1e-15);
  CHECK_THROWS_AS(apply_cos_r(LoopVector::basis(1, 3, 0, 0), s0, 0.5), RejectedInput);
}

TEST_CASE("J") {
  CHECK(mode_err(apply_J(LoopVector::basis(1, 3, 3, 0)), 3, 0, cplx(0, 1)) < 1e-15);
  CHECK(mode_err(apply_J(LoopVector::basis(1, 3, -3, 0)), -3, 0, cplx(0, -1)) < 1e-15);
  CHECK(mode_err(apply_J(LoopVector::basis(1, 3, 0, 0)), 0, 0, cplx(0, 1)) < 1e-15);
}

TEST_CASE("apply_loop") {
  const auto out = apply_loop(MatrixLoop::monomial(1, one()), LoopVector::basis(1, 0, 0, 0));
  CHECK(out.bound() == 1);
  CHECK(mode_err(out, 1, 0, 1.0) < 1e-15);

  const Matrix u = (Matrix(2, 2) << cplx(0, 1), 0, 0, cplx(0.6, 0.8)).finished();
  LoopVector v(2, 2);
  v.mode(-1) << cplx(1, 2), 3;
  v.mode(2) << -1, cplx(0, 0.5);
  CHECK(l2_norm(apply_loop(MatrixLoop::constant(u), v)) == doctest::Approx(l2_norm(v)).epsilon(1e-15));

  Matrix p1 = Matrix::Zero(2, 2), p2 = Matrix::Zero(2, 2);
  p1(0, 0) = 1.0;
  p2(1, 1) = 1.0;
  LoopVector w(2, 0);
  w.mode(0) << 1, 1;
  const auto sh = apply_loop(MatrixLoop::from_coeffs({{1, p1}, {-1, p2}}), w);
  CHECK(std::abs(sh.mode(1)(0) - 1.0) + std::abs(sh.mode(-1)(1) - 1.0) < 1e-15);
  CHECK(std::abs(sh.mode(1)(1)) + std::abs(sh.mode(-1)(0)) + sh.mode(0).norm() == 0.0);
}

TEST_CASE("l2r inner product makes cos_r D_s isometric") {
  const double r = 2.0;
  ShiftData s = ShiftData::standard(2, 0.3);
  LoopVector v(2, 3);
  v.mode(-2) << cplx(0.2, 1), 0.5;
  v.mode(1) << 1, cplx(-1, 0.1);
  const double lhs = std::sqrt(l2r_inner_product(v, v, s, r).real());
  CHECK(lhs == doctest::Approx(l2_norm(apply_cos_r(v, s, r))).epsilon(1e-14));
}

TEST_CASE("hs_commutator_norm") {
  CHECK(hs_commutator_norm(MatrixLoop::monomial(1, one())) == doctest::Approx(2.0));
  CHECK(reference::brute_force_hs(MatrixLoop::monomial(1, one()), 64) == doctest::Approx(2.0));
  CHECK(hs_commutator_norm(MatrixLoop::constant(Matrix::Constant(3, 3, cplx(1, 1)))) == 0.0);
  CHECK(hs_commutator_norm(MatrixLoop::monomial(2, one())) == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(reference::brute_force_hs(MatrixLoop::monomial(2, one()), 4) == doctest::Approx(2.0 * std::sqrt(2.0)));
}

TEST_CASE("conjugated_hs_tail") {
  const auto tail = conjugated_hs_tail(MatrixLoop::constant(Matrix::Constant(2, 2, cplx(0.5, -1))),
                                       ShiftData::standard(2, 0.25), 3.0, 10);
  CHECK(tail.size() == 11);
  for (double x : tail) CHECK(x == 0.0);

  // z^1 in dimension 1 with s = 0: only the -1 -> 0 entry crosses the sign
  // change, and conjugation scales it by cosh(-ln r) / cosh(0).
  const auto t1 = conjugated_hs_tail(MatrixLoop::monomial(1, one()), ShiftData::standard(1), 2.0, 4);
  CHECK(t1[0] == 0.0);
  CHECK(t1[1] == doctest::Approx(2.5));
  CHECK(t1[4] == doctest::Approx(2.5));
  CHECK(t1[4] == doctest::Approx(reference::brute_force_conjugated_hs(MatrixLoop::monomial(1, one()), ShiftData::standard(1), 2.0, 4)));
}

TEST_CASE("loop vector json") {
  LoopVector v(2, 1);
  v.mode(-1) << cplx(1, 2), 3;
  nlohmann::json j = v;
  CHECK(j["dim"] == 2);
  CHECK(j["P"] == 1);
  const auto w = loop_vector_from_json(j);
  CHECK((w.coeffs() - v.coeffs()).norm() == 0.0);
}
