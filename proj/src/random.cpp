#include "polyloop/random.hpp"

#include <Eigen/QR>

namespace polyloop {

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

int Rng::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

RealMatrix Rng::real_gaussian(Eigen::Index rows, Eigen::Index cols) {
  RealMatrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = normal();
  return m;
}

Matrix Rng::gaussian(Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = normal();
      m(r, c) = cplx(re, normal());
    }
  return m;
}

Vector Rng::unit_vector(Eigen::Index n) {
  Vector v = gaussian(n, 1);
  return v / v.norm();
}

Matrix Rng::unitary(Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(n, n));
  Matrix q = qr.householderQ();
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

Matrix Rng::special_unitary(Eigen::Index n) {
  Matrix u = unitary(n);
  const cplx det = u.determinant();
  u.col(0) /= det;
  return u;
}

RealMatrix Rng::special_orthogonal(Eigen::Index n) {
  Eigen::HouseholderQR<RealMatrix> qr(real_gaussian(n, n));
  RealMatrix q = qr.householderQ();
  const RealMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  if (q.determinant() < 0) q.col(0) *= -1.0;
  return q;
}

SkewMatrix Rng::skew(Eigen::Index n, double scale) {
  const Matrix a = gaussian(n, n);
  return SkewMatrix(Matrix(0.5 * scale * (a - a.adjoint())));
}

SkewMatrix Rng::real_skew(Eigen::Index n, double scale) {
  const RealMatrix a = real_gaussian(n, n);
  return SkewMatrix::real(0.5 * scale * (a - a.transpose()));
}

}  // namespace polyloop
