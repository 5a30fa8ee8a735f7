#include "polyloop/reference.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace polyloop::reference {

namespace {

Matrix multiplication_operator(const MatrixLoop& a, int bound) {
  const auto n = a.dim();
  const auto m = n * (2 * bound + 1);
  Matrix op = Matrix::Zero(m, m);
  for (int p = -bound; p <= bound; ++p)
    for (int q = -bound; q <= bound; ++q) op.block((p + bound) * n, (q + bound) * n, n, n) = a.coeff(p - q);
  return op;
}

Vector polarisation(Eigen::Index n, int bound) {
  Vector j(n * (2 * bound + 1));
  for (int p = -bound; p <= bound; ++p) j.segment((p + bound) * n, n).setConstant(cplx(0.0, p >= 0 ? 1.0 : -1.0));
  return j;
}

double commutator_hs(const Matrix& op, const Vector& j) {
  return (op * j.asDiagonal() - j.asDiagonal() * op).norm();
}

}  // namespace

double brute_force_hs(const MatrixLoop& a, int bound) {
  return commutator_hs(multiplication_operator(a, bound), polarisation(a.dim(), bound));
}

double brute_force_conjugated_hs(const MatrixLoop& a, const ShiftData& s, double r, int bound) {
  const auto n = a.dim();
  const auto m = n * (2 * bound + 1);
  Matrix c = Matrix::Zero(m, m);
  const double log_r = std::log(r);
  for (int p = -bound; p <= bound; ++p) {
    Vector w(n);
    for (Eigen::Index j = 0; j < n; ++j) w(j) = std::cosh((p + s.shifts()[j]) * log_r);
    c.block((p + bound) * n, (p + bound) * n, n, n) = s.basis() * w.asDiagonal() * s.basis().adjoint();
  }
  const Matrix conj = c.inverse() * multiplication_operator(a, bound) * c;
  return commutator_hs(conj, polarisation(n, bound));
}

Matrix direct_coefficient(const std::function<Matrix(double)>& f, int k, int grid) {
  Matrix sum;
  for (int i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / grid;
    const Matrix term = std::polar(1.0, -kTwoPi * k * t) * f(t);
    if (i == 0)
      sum = term;
    else
      sum += term;
  }
  return sum / static_cast<double>(grid);
}

double direct_tail(const std::function<Matrix(double)>& f, int degree, int grid) {
  std::vector<Matrix> values;
  values.reserve(grid);
  for (int i = 0; i < grid; ++i) values.push_back(f(static_cast<double>(i) / grid));
  double tail = 0.0, total = 0.0;
  for (int k = -grid / 2 + 1; k < grid / 2; ++k) {
    Matrix c = Matrix::Zero(values[0].rows(), values[0].cols());
    for (int i = 0; i < grid; ++i) c += std::polar(1.0, -kTwoPi * k * static_cast<double>(i) / grid) * values[i];
    const double m2 = (c / static_cast<double>(grid)).squaredNorm();
    total += m2;
    if (std::abs(k) > degree) tail += m2;
  }
  return std::sqrt(tail / total);
}

double jacobi_anger_tail(double a, int shift, int degree) {
  double tail = 0.0;
  for (int m = -80; m <= 80; ++m) {
    const double jm = (m < 0 && (-m) % 2 == 1 ? -1.0 : 1.0) * std::cyl_bessel_j(std::abs(m), a);
    if (std::abs(shift + m) > degree) tail += jm * jm;
  }
  return std::sqrt(tail);
}

double modified_bessel_tail(double c, int degree) {
  double tail = 0.0;
  for (int m = degree + 1; m <= degree + 80; ++m) {
    const double im = std::cyl_bessel_i(m, c);
    tail += 2.0 * im * im;
  }
  return std::sqrt(tail);
}

double modified_bessel_total(double c) { return std::sqrt(std::cyl_bessel_i(0, 2.0 * c)); }

Matrix pade_exp(const Matrix& a) { return a.exp(); }

RealMatrix latitude_frame(double theta, int winding, double t) {
  const double angle = -kTwoPi * winding * std::cos(theta) * t;
  RealMatrix r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

double latitude_angle(double theta, int winding) {
  const double a = std::fmod(kTwoPi * winding * (1.0 - std::cos(theta)), kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

double rotation_angle(const RealMatrix& g) {
  const double a = std::atan2(g(1, 0) - g(0, 1), g(0, 0) + g(1, 1));
  return a < 0 ? a + kTwoPi : a;
}

}  // namespace polyloop::reference
