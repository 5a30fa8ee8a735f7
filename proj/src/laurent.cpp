#include "polyloop/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/FFT>

#include "polyloop/errors.hpp"

namespace polyloop {

const char* to_string(Field f) { return f == Field::real ? "real" : "complex"; }

const char* to_string(Group g) {
  switch (g) {
    case Group::U: return "U";
    case Group::SU: return "SU";
    case Group::SO: return "SO";
  }
  return "?";
}

Group parse_group(const std::string& name) {
  if (name == "U" || name == "u") return Group::U;
  if (name == "SU" || name == "su") return Group::SU;
  if (name == "SO" || name == "so") return Group::SO;
  throw RejectedInput("unknown group '" + name + "' (expected U, SU or SO)");
}

MatrixLoop::MatrixLoop(Eigen::Index rows, Eigen::Index cols, Field field)
    : rows_(rows), cols_(cols), field_(field) {
  if (rows <= 0 || cols <= 0) throw RejectedInput("MatrixLoop: dimensions must be positive");
}

MatrixLoop MatrixLoop::from_coeffs(std::map<int, Matrix> coeffs, Field field) {
  if (coeffs.empty()) throw RejectedInput("MatrixLoop::from_coeffs: no coefficients (shape unknown)");
  const auto rows = coeffs.begin()->second.rows();
  const auto cols = coeffs.begin()->second.cols();
  MatrixLoop out(rows, cols, field);
  double scale = 0.0;
  for (const auto& [k, a] : coeffs) {
    if (a.rows() != rows || a.cols() != cols)
      throw RejectedInput("MatrixLoop::from_coeffs: coefficient " + std::to_string(k) + " has the wrong shape");
    if (!a.allFinite()) throw RejectedInput("MatrixLoop::from_coeffs: non-finite coefficient");
    scale = std::max(scale, a.norm());
  }
  if (field == Field::real) {
    const Matrix zero = Matrix::Zero(rows, cols);
    for (const auto& [k, a] : coeffs) {
      auto it = coeffs.find(-k);
      const Matrix& b = it == coeffs.end() ? zero : it->second;
      if ((a - b.conjugate()).norm() > 1e-12 * std::max(1.0, scale))
        throw RejectedInput("MatrixLoop::from_coeffs: real-tagged loop violates A_{-k} = conj(A_k) at k = " +
                            std::to_string(k));
    }
    std::map<int, Matrix> sym;
    for (const auto& [k, a] : coeffs) {
      if (k < 0) continue;
      auto it = coeffs.find(-k);
      const Matrix b = it == coeffs.end() ? Matrix(a.conjugate()) : it->second;
      Matrix avg = 0.5 * (a + b.conjugate());
      if (k == 0) avg = avg.real().cast<cplx>();
      sym[k] = avg;
      if (k != 0) sym[-k] = avg.conjugate();
    }
    coeffs = std::move(sym);
  }
  for (auto& [k, a] : coeffs)
    if (!a.isZero(0.0)) out.coeffs_.emplace(k, std::move(a));
  return out;
}

MatrixLoop MatrixLoop::constant(const Matrix& a, Field field) { return from_coeffs({{0, a}}, field); }

MatrixLoop MatrixLoop::monomial(int k, const Matrix& a) { return from_coeffs({{k, a}}, Field::complex); }

MatrixLoop MatrixLoop::identity(Eigen::Index n) { return constant(Matrix::Identity(n, n), Field::real); }

Matrix MatrixLoop::coeff(int k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? Matrix::Zero(rows_, cols_) : it->second;
}

int MatrixLoop::min_power() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }
int MatrixLoop::max_power() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
int MatrixLoop::degree() const { return std::max(std::abs(min_power()), std::abs(max_power())); }

MatrixLoop MatrixLoop::adjoint() const {
  MatrixLoop out(cols_, rows_, field_);
  for (const auto& [k, a] : coeffs_) out.coeffs_.emplace(-k, a.adjoint());
  return out;
}

MatrixLoop laurent_mul(const MatrixLoop& a, const MatrixLoop& b) {
  if (a.cols() != b.rows())
    throw RejectedInput("laurent_mul: dimension mismatch (" + std::to_string(a.cols()) + " vs " +
                        std::to_string(b.rows()) + ")");
  const Field field = (a.field() == Field::real && b.field() == Field::real) ? Field::real : Field::complex;
  std::map<int, Matrix> out;
  for (const auto& [j, aj] : a.coeffs()) {
    for (const auto& [k, bk] : b.coeffs()) {
      auto [it, inserted] = out.try_emplace(j + k, Matrix::Zero(a.rows(), b.cols()));
      it->second.noalias() += aj * bk;
    }
  }
  if (out.empty()) return MatrixLoop(a.rows(), b.cols(), field);
  // Round-off can break the conjugate symmetry at the 1e-16 level; from_coeffs restores it.
  return MatrixLoop::from_coeffs(std::move(out), field);
}

Matrix laurent_eval(const MatrixLoop& a, double t) {
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (const auto& [k, ak] : a.coeffs()) out += std::polar(1.0, kTwoPi * k * t) * ak;
  return out;
}

double matrix_group_residual(const Matrix& a, Group group) {
  if (a.rows() != a.cols()) throw RejectedInput("group residual: matrix is not square");
  const auto n = a.rows();
  double res = (a.adjoint() * a - Matrix::Identity(n, n)).norm();
  if (group == Group::SU || group == Group::SO) res += std::abs(a.determinant() - cplx(1.0));
  if (group == Group::SO) res += a.imag().norm();
  return res;
}

double group_residual(const MatrixLoop& a, Group group, int samples) {
  if (!a.is_square()) throw RejectedInput("group_residual: loop is not square");
  if (samples <= 0) throw RejectedInput("group_residual: samples must be positive");
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
    worst = std::max(worst, matrix_group_residual(laurent_eval(a, static_cast<double>(i) / samples), group));
  return worst;
}

SampledLoop::SampledLoop(Eigen::Index rows, Eigen::Index cols, std::vector<Matrix> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  const auto n = values_.size();
  if (n < 2 || (n & (n - 1)) != 0) throw RejectedInput("SampledLoop: grid size must be a power of two >= 2");
  for (const auto& v : values_)
    if (v.rows() != rows_ || v.cols() != cols_) throw RejectedInput("SampledLoop: inconsistent sample shape");
}

SampledLoop SampledLoop::sample(const std::function<Matrix(double)>& f, Eigen::Index rows, Eigen::Index cols,
                                int grid) {
  std::vector<Matrix> values;
  values.reserve(grid);
  for (int i = 0; i < grid; ++i) values.push_back(f(static_cast<double>(i) / grid));
  return SampledLoop(rows, cols, std::move(values));
}

SampledLoop SampledLoop::sample(const MatrixLoop& a, int grid) {
  return sample([&a](double t) { return laurent_eval(a, t); }, a.rows(), a.cols(), grid);
}

const Matrix& SampledLoop::operator[](long i) const {
  const long n = static_cast<long>(values_.size());
  return values_[static_cast<size_t>(((i % n) + n) % n)];
}

namespace {

// All DFT coefficients of every entry, indexed [k mod N_s].
std::vector<Matrix> dft_coefficients(const SampledLoop& s) {
  const int n = s.grid_size();
  std::vector<Matrix> coeffs(n, Matrix::Zero(s.rows(), s.cols()));
  Eigen::FFT<double> fft;
  std::vector<cplx> in(n), out(n);
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
      for (int i = 0; i < n; ++i) in[i] = s.values()[i](r, c);
      fft.fwd(out, in);
      for (int k = 0; k < n; ++k) coeffs[k](r, c) = out[k] / static_cast<double>(n);
    }
  }
  return coeffs;
}

}  // namespace

FourierProjection fourier_project(const SampledLoop& s, int degree) {
  const int n = s.grid_size();
  if (degree < 0) throw RejectedInput("fourier_project: negative degree");
  if (2 * degree >= n)
    throw RejectedInput("fourier_project: degree " + std::to_string(degree) + " aliases on a grid of " +
                        std::to_string(n));
  const auto coeffs = dft_coefficients(s);
  std::map<int, Matrix> kept;
  double tail2 = 0.0, total2 = 0.0;
  for (int idx = 0; idx < n; ++idx) {
    const int k = idx <= n / 2 ? idx : idx - n;
    const double m2 = coeffs[idx].squaredNorm();
    total2 += m2;
    if (std::abs(k) <= degree)
      kept.emplace(k, coeffs[idx]);
    else
      tail2 += m2;
  }
  MatrixLoop loop = MatrixLoop::from_coeffs(std::move(kept), Field::complex);
  return {std::move(loop), std::sqrt(tail2), std::sqrt(total2)};
}

double polynomiality_residual(const SampledLoop& s, int degree) {
  if (4 * degree >= s.grid_size())
    throw RejectedInput("polynomiality_residual: degree " + std::to_string(degree) +
                        " exceeds the guard band N < N_s/4");
  const auto proj = fourier_project(s, degree);
  if (proj.total == 0.0) return 0.0;
  return proj.residual / proj.total;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  const auto rows = static_cast<Eigen::Index>(re.size());
  if (rows == 0 || im.size() != re.size()) throw RejectedInput("matrix JSON: empty or mismatched re/im");
  const auto cols = static_cast<Eigen::Index>(re.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(re.at(r).size()) != cols || static_cast<Eigen::Index>(im.at(r).size()) != cols)
      throw RejectedInput("matrix JSON: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cplx(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
  }
  return m;
}

void to_json(nlohmann::json& j, const MatrixLoop& a) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& [k, ak] : a.coeffs()) {
    auto entry = matrix_to_json(ak);
    entry["k"] = k;
    coeffs.push_back(std::move(entry));
  }
  j = {{"dim", a.dim()}, {"field", to_string(a.field())}, {"coeffs", std::move(coeffs)}};
}

MatrixLoop matrix_loop_from_json(const nlohmann::json& j) {
  const auto dim = j.at("dim").get<Eigen::Index>();
  const auto field_name = j.at("field").get<std::string>();
  if (field_name != "real" && field_name != "complex") throw RejectedInput("MatrixLoop JSON: bad field tag");
  const Field field = field_name == "real" ? Field::real : Field::complex;
  std::map<int, Matrix> coeffs;
  for (const auto& entry : j.at("coeffs")) {
    Matrix m = matrix_from_json(entry);
    if (m.rows() != dim) throw RejectedInput("MatrixLoop JSON: coefficient rows do not match dim");
    if (!coeffs.emplace(entry.at("k").get<int>(), std::move(m)).second)
      throw RejectedInput("MatrixLoop JSON: repeated power");
  }
  if (coeffs.empty()) return MatrixLoop(dim, dim, field);
  return MatrixLoop::from_coeffs(std::move(coeffs), field);
}

}  // namespace polyloop
