#pragma once

// Finitely supported Laurent series with matrix coefficients, and sampled
// loops on a uniform grid of the circle R/Z.  A loop is evaluated at
// t in [0,1) through z = exp(2 pi i t).

#include <complex>
#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace polyloop {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

/// Default number of samples per period for every sampled loop.
inline constexpr int kDefaultGrid = 1024;
/// Normalised Fourier tail below which a sampled loop is declared polynomial.
inline constexpr double kPolynomialThreshold = 1e-8;

enum class Field { real, complex };
enum class Group { U, SU, SO };

const char* to_string(Field f);
const char* to_string(Group g);
Group parse_group(const std::string& name);

/// Laurent polynomial sum_k A_k z^k with rows x cols coefficients.
///
/// Square loops house elements of L_pol End(V) and of the polynomial loop
/// groups; single-column loops house polynomial loops in V.  Real-tagged
/// loops are stored in complex form and satisfy A_{-k} = conj(A_k).
class MatrixLoop {
 public:
  MatrixLoop(Eigen::Index rows, Eigen::Index cols, Field field = Field::complex);

  /// Builds a loop from explicit coefficients.  Exact zero coefficients are
  /// dropped.  For real-tagged loops the conjugate symmetry is checked
  /// (relative 1e-12) and then imposed exactly.
  static MatrixLoop from_coeffs(std::map<int, Matrix> coeffs, Field field = Field::complex);
  static MatrixLoop constant(const Matrix& a, Field field = Field::complex);
  static MatrixLoop monomial(int k, const Matrix& a);
  static MatrixLoop identity(Eigen::Index n);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index dim() const { return rows_; }
  bool is_square() const { return rows_ == cols_; }
  Field field() const { return field_; }

  const std::map<int, Matrix>& coeffs() const { return coeffs_; }
  Matrix coeff(int k) const;
  bool empty() const { return coeffs_.empty(); }
  int min_power() const;
  int max_power() const;
  /// max |k| over the support (0 for the zero loop).
  int degree() const;

  /// Pointwise conjugate transpose: sum_k A_k^* z^{-k}.
  MatrixLoop adjoint() const;

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  Field field_;
  std::map<int, Matrix> coeffs_;
};

MatrixLoop laurent_mul(const MatrixLoop& a, const MatrixLoop& b);
inline MatrixLoop operator*(const MatrixLoop& a, const MatrixLoop& b) { return laurent_mul(a, b); }

/// sum_k A_k exp(2 pi i k t).
Matrix laurent_eval(const MatrixLoop& a, double t);

/// Distance of a matrix from the group: ||a^* a - I||_F, plus |det a - 1| for
/// SU and SO, plus ||Im a||_F for SO.
double matrix_group_residual(const Matrix& a, Group group);

/// Maximum of matrix_group_residual over t_i = i / samples.
double group_residual(const MatrixLoop& a, Group group, int samples = 64);

/// Values of a loop at t_i = i / N_s.  N_s is a power of two.
class SampledLoop {
 public:
  SampledLoop(Eigen::Index rows, Eigen::Index cols, std::vector<Matrix> values);

  static SampledLoop sample(const std::function<Matrix(double)>& f, Eigen::Index rows,
                            Eigen::Index cols, int grid = kDefaultGrid);
  static SampledLoop sample(const MatrixLoop& a, int grid = kDefaultGrid);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  int grid_size() const { return static_cast<int>(values_.size()); }
  double time(int i) const { return static_cast<double>(i) / grid_size(); }
  /// Periodic indexing.
  const Matrix& operator[](long i) const;
  const std::vector<Matrix>& values() const { return values_; }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  std::vector<Matrix> values_;
};

struct FourierProjection {
  MatrixLoop loop;
  /// l2 mass of the discarded coefficients, sqrt(sum_{|k|>N} ||c_k||_F^2).
  double residual;
  /// l2 mass of all coefficients.
  double total;
};

/// Discrete Fourier coefficients c_k = (1/N_s) sum_i f(t_i) exp(-2 pi i k t_i)
/// truncated to |k| <= degree.  Rejects degree >= N_s / 2.
FourierProjection fourier_project(const SampledLoop& s, int degree);

/// Fourier tail beyond `degree` divided by total mass.  Requires
/// degree < N_s / 4 so aliased modes stay far from the kept band.
double polynomiality_residual(const SampledLoop& s, int degree);

inline bool is_polynomial(const SampledLoop& s, int degree) {
  return polynomiality_residual(s, degree) < kPolynomialThreshold;
}

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const MatrixLoop& a);
MatrixLoop matrix_loop_from_json(const nlohmann::json& j);

}  // namespace polyloop
