#include <doctest.h>

#include "polyloop/errors.hpp"
#include "polyloop/holonomy.hpp"
#include "polyloop/reference.hpp"

using namespace polyloop;

namespace {

Matrix rotation(double phi) {
  Matrix r(2, 2);
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}

double mod1(double x) { return std::abs(std::remainder(x, 1.0)); }

}  // namespace

TEST_CASE("transport") {
  const ConnectionModel torus(ModelKind::torus);
  BaseLoop l;
  l.torus_winding = {2, -1};
  for (auto [a, b] : {std::pair{0.0, 1.0}, {0.2, 0.9}, {0.7, 0.1}})
    CHECK((transport(torus, l, a, b).value - Matrix::Identity(2, 2)).norm() == 0.0);

  const ConnectionModel sphere(ModelKind::sphere);
  const auto equator = BaseLoop::latitude(kPi / 2);
  CHECK((holonomy(sphere, equator).value - Matrix::Identity(2, 2)).norm() < 1e-8);
  CHECK((holonomy(sphere, equator, 10 * kDefaultSteps).value - Matrix::Identity(2, 2)).norm() < 1e-8);
  CHECK_THROWS_AS(transport(sphere, equator, 0.0, 1.0, 8), RejectedInput);
}

TEST_CASE("latitude holonomy") {
  const ConnectionModel sphere(ModelKind::sphere);
  const auto g = holonomy(sphere, BaseLoop::latitude(kPi / 3)).value;
  CHECK((g + Matrix::Identity(2, 2)).norm() < 1e-6);
  const auto fine = holonomy(sphere, BaseLoop::latitude(kPi / 3), 10 * kDefaultSteps).value;
  CHECK((g - fine).norm() < 1e-8);
  for (double theta : {0.4, 1.0, 2.2}) {
    const double got = reference::rotation_angle(holonomy(sphere, BaseLoop::latitude(theta)).value.real());
    CHECK(std::abs(std::remainder(got - reference::latitude_angle(theta, 1), kTwoPi)) < 1e-6);
  }
  BaseLoop bad = BaseLoop::latitude(0.1);
  bad.theta_amp = 0.2;
  CHECK_THROWS_AS(holonomy(sphere, bad), RejectedInput);
}

TEST_CASE("su2 loops have trivial holonomy") {
  const ConnectionModel su2(ModelKind::su2);
  BaseLoop l;
  l.axis = {1.0, -2.0, 0.5};
  l.winding = 2;
  CHECK((holonomy(su2, l).value - Matrix::Identity(3, 3)).norm() < 1e-8);
}

TEST_CASE("floquet") {
  const auto id = floquet(Matrix::Identity(3, 3));
  for (double s : id.exponents) CHECK(s == 0.0);
  for (double phi : {0.5, 2.0, -1.2}) {
    const auto f = floquet(rotation(phi));
    REQUIRE(f.exponents.size() == 2);
    CHECK(f.exponents[0] == doctest::Approx(-std::abs(phi) / kTwoPi));
    CHECK(f.exponents[1] == doctest::Approx(std::abs(phi) / kTwoPi));
  }
  // Rotation by pi: both eigenvalues are -1 and the window [-1/2, 1/2) puts
  // both exponents at -1/2, which agrees with +-1/2 modulo 1.
  const auto half = floquet(rotation(kPi));
  for (double s : half.exponents) CHECK(mod1(s - 0.5) < 1e-9);
  for (double s : half.exponents) CHECK(s >= -0.5);
  CHECK((half.frame.adjoint() * half.frame - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("eigen sections") {
  const auto torus = monodromy(ConnectionModel(ModelKind::torus), BaseLoop{});
  const auto basis = eigen_sections(torus, 3);
  CHECK(basis.size() == 14);
  for (Eigen::Index k = 0; k < basis.size(); ++k) {
    const auto [p, j] = basis.labels[k];
    for (Eigen::Index i = 0; i < basis.sections[k].cols(); ++i) {
      const double t = static_cast<double>(i) / torus.grid();
      CHECK(std::abs(basis.sections[k](j, i) - std::polar(1.0, kTwoPi * p * t)) < 1e-15);
      CHECK(std::abs(basis.sections[k](1 - j, i)) == 0.0);
    }
  }
  CHECK(gram_error(basis) < 1e-12);

  const ConnectionModel sphere(ModelKind::sphere);
  BaseLoop l = BaseLoop::latitude(1.1);
  l.phi_amp = 0.1;
  const auto data = monodromy(sphere, l);
  const auto sb = eigen_sections(data, 4);
  CHECK(gram_error(sb) < 1e-8);
  CHECK(d_hat_residual(sphere, l, sb) < 1e-6);
}

TEST_CASE("project_section") {
  const ConnectionModel sphere(ModelKind::sphere);
  const auto l = BaseLoop::latitude(0.9);
  const auto data = monodromy(sphere, l);
  const auto basis = eigen_sections(data, 4);
  const auto c = project_section(basis.sections[basis.index(2, 1)], basis);
  CHECK(std::abs(c.coeff(2, 1) - 1.0) < 1e-10);
  CHECK((c.coeffs.array().abs().sum() - 1.0) < 1e-9);

  const auto tdata = monodromy(ConnectionModel(ModelKind::torus), BaseLoop{});
  const auto tb = eigen_sections(tdata, 2);
  Matrix constant(2, tdata.grid());
  constant.colwise() = (Vector(2) << cplx(0.3, 1), -2).finished();
  const auto tc = project_section(constant, tb);
  CHECK(std::abs(tc.coeff(0, 0) - cplx(0.3, 1)) < 1e-12);
  CHECK(std::abs(tc.coeff(0, 1) + 2.0) < 1e-12);
  CHECK(tc.coeffs.array().abs().sum() - std::abs(cplx(0.3, 1)) - 2.0 < 1e-12);

  // A smooth section: the residual falls monotonically with P.
  Matrix alpha(2, data.grid());
  for (int i = 0; i < data.grid(); ++i) {
    const double t = static_cast<double>(i) / data.grid();
    alpha.col(i) << std::exp(0.5 * std::sin(kTwoPi * t)), cplx(std::cos(kTwoPi * t), 0.2);
  }
  double prev = INFINITY;
  for (int p : {1, 2, 4, 8, 16}) {
    const double res = project_section(alpha, eigen_sections(data, p)).residual;
    CHECK(res < prev);
    prev = res;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("cos_inner_product") {
  const auto tdata = monodromy(ConnectionModel(ModelKind::torus), BaseLoop{});
  const auto tb = eigen_sections(tdata, 2);
  const auto m1 = project_section(tb.sections[tb.index(1, 0)], tb);
  CHECK(cos_inner_product(m1, m1, tb.exponents, 2.0).real() == doctest::Approx(1.5625).epsilon(1e-12));
  CHECK_THROWS_AS(cos_inner_product(m1, m1, tb.exponents, 1.0), RejectedInput);

  const auto sdata = monodromy(ConnectionModel(ModelKind::sphere), BaseLoop::latitude(kPi / 3));
  const auto sb = eigen_sections(sdata, 2);
  const double expected = std::pow((std::sqrt(2.0) + 1.0 / std::sqrt(2.0)) / 2.0, 2);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const auto c = project_section(sb.sections[sb.index(0, j)], sb);
    CHECK(cos_inner_product(c, c, sb.exponents, 2.0).real() == doctest::Approx(expected).epsilon(1e-9));
  }
  const auto a = project_section(sb.sections[sb.index(1, 0)] + sb.sections[sb.index(-1, 1)], sb);
  const auto b = project_section(sb.sections[sb.index(1, 0)] - 0.5 * sb.sections[sb.index(2, 1)], sb);
  CHECK(std::abs(cos_inner_product(a, b, sb.exponents, 1.0 + 1e-9) - 1.0) < 1e-6);
}

TEST_CASE("reparametrisations") {
  Reparam bad;
  bad.amplitude = 0.2;
  CHECK_THROWS_AS(bad.validate(), RejectedInput);
  Reparam flip;
  flip.orientation = 2;
  CHECK_THROWS_AS(flip.validate(), RejectedInput);

  const ConnectionModel sphere(ModelKind::sphere);
  const auto l = BaseLoop::latitude(kPi / 3);
  const SectionFunction alpha = [](double t) {
    Vector v(2);
    v << std::polar(1.0, kTwoPi * t), 0.5 * std::cos(kTwoPi * 2 * t);
    return v;
  };
  CHECK(condiff_residual(sphere, l, Reparam{}, alpha) < 1e-10);
  Reparam rot;
  rot.shift = 0.3;
  CHECK(condiff_residual(sphere, l, rot, alpha) < 1e-6);
  Reparam wobble;
  wobble.amplitude = 0.1;
  CHECK(condiff_residual(sphere, l, wobble, alpha) < 1e-4);

  const auto r = reparam_actions(sphere, l, rot, 3);
  CHECK(r.standard_residual < 1e-8);
  CHECK(r.coefficient_drift < 1e-12);
  CHECK(r.transport_periodicity < 1e-8);
  CHECK(reparam_actions(sphere, l, wobble, 3).standard_residual > 1e-3);
}

TEST_CASE("subbundle counterexample") {
  const auto one = MatrixLoop::constant(Matrix::Identity(1, 1));
  const auto lin = subbundle_counterexample([](double t) { return t; }, one);
  CHECK(lin.residual < 1e-10);
  CHECK(lin.winding == 1);

  const auto bent = [](double t) { return t + 0.3 * std::sin(kTwoPi * t); };
  const auto a = subbundle_counterexample(bent, one);
  CHECK(a.degree == 5);
  CHECK(a.residual > 1e-3);
  CHECK(a.residual == doctest::Approx(5.41e-3).epsilon(2e-3));
  CHECK(a.residual == doctest::Approx(reference::jacobi_anger_tail(kTwoPi * 0.3, 1, 5)).epsilon(1e-8));

  const auto b = subbundle_counterexample(bent, MatrixLoop::monomial(2, Matrix::Identity(1, 1)));
  CHECK(b.degree == 7);
  CHECK(b.residual > 1e-3);
  CHECK(b.residual == doctest::Approx(reference::jacobi_anger_tail(kTwoPi * 0.3, 3, 7)).epsilon(1e-8));
}

TEST_CASE("loop parameters") {
  CHECK(parse_model("S2") == ModelKind::sphere);
  CHECK(parse_model("torus+sphere") == ModelKind::torus_sphere);
  CHECK_THROWS_AS(parse_model("klein"), RejectedInput);
  const auto j = loop_params_json(ModelKind::sphere, BaseLoop::latitude(1.0, 2));
  CHECK(j["theta"] == 1.0);
  CHECK(j["winding"] == 2);
}
