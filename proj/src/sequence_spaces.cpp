#include "polyloop/sequence_spaces.hpp"

#include <cmath>
#include <string>

#include "polyloop/errors.hpp"

namespace polyloop {

namespace {

void require_r(double r, const char* who) {
  if (!(r > 1.0)) throw RejectedInput(std::string(who) + ": r must exceed 1 (got " + std::to_string(r) + ")");
}

void require_dim(const LoopVector& v, const ShiftData& s, const char* who) {
  if (v.dim() != s.dim()) throw RejectedInput(std::string(who) + ": dimension mismatch");
}

int sign(int p) { return p >= 0 ? 1 : -1; }

// Applies mode-wise diagonal scaling f(p, s_j) in the {v_j} basis.
template <typename F>
LoopVector scale_modes(const LoopVector& v, const ShiftData& s, F&& f) {
  LoopVector out(v.dim(), v.bound());
  const Matrix& basis = s.basis();
  Vector c(v.dim());
  for (int p = -v.bound(); p <= v.bound(); ++p) {
    c.noalias() = basis.adjoint() * v.mode(p);
    for (Eigen::Index j = 0; j < v.dim(); ++j) c(j) *= f(p, s.shifts()[j]);
    out.mode(p) = basis * c;
  }
  return out;
}

// Block C_p of cos_r D_s acting on mode p, in standard coordinates.
Matrix cos_block(int p, const ShiftData& s, double log_r, bool inverse) {
  Vector w(s.dim());
  for (Eigen::Index j = 0; j < s.dim(); ++j) {
    const double c = std::cosh((p + s.shifts()[j]) * log_r);
    w(j) = inverse ? 1.0 / c : c;
  }
  return s.basis() * w.asDiagonal() * s.basis().adjoint();
}

}  // namespace

ShiftData::ShiftData(Matrix basis, std::vector<double> shifts) : basis_(std::move(basis)), shifts_(std::move(shifts)) {
  if (basis_.rows() != basis_.cols() || basis_.rows() == 0) throw RejectedInput("ShiftData: basis must be square");
  if (static_cast<Eigen::Index>(shifts_.size()) != basis_.cols())
    throw RejectedInput("ShiftData: need one shift per basis vector");
  const auto n = basis_.rows();
  if ((basis_.adjoint() * basis_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
    throw RejectedInput("ShiftData: basis is not orthonormal");
}

ShiftData ShiftData::standard(Eigen::Index n, double shift) {
  return ShiftData(Matrix::Identity(n, n), std::vector<double>(static_cast<size_t>(n), shift));
}

LoopVector::LoopVector(Eigen::Index dim, int bound) : bound_(bound), coeffs_(Matrix::Zero(dim, 2 * bound + 1)) {
  if (dim <= 0 || bound < 0) throw RejectedInput("LoopVector: need dim > 0 and bound >= 0");
}

LoopVector::LoopVector(int bound, Matrix coeffs) : bound_(bound), coeffs_(std::move(coeffs)) {
  if (bound < 0 || coeffs_.cols() != 2 * bound + 1 || coeffs_.rows() == 0)
    throw RejectedInput("LoopVector: coefficient matrix must be n x (2P+1)");
  if (!coeffs_.allFinite()) throw RejectedInput("LoopVector: non-finite coefficient");
}

LoopVector LoopVector::basis(Eigen::Index dim, int bound, int p, Eigen::Index j) {
  if (std::abs(p) > bound || j < 0 || j >= dim) throw RejectedInput("LoopVector::basis: mode out of range");
  LoopVector v(dim, bound);
  v.mode(p)(j) = 1.0;
  return v;
}

LoopVector LoopVector::padded(int bound) const {
  if (bound < bound_) throw RejectedInput("LoopVector::padded: cannot shrink the mode bound");
  LoopVector out(dim(), bound);
  out.coeffs_.middleCols(bound - bound_, 2 * bound_ + 1) = coeffs_;
  return out;
}

double l2_norm(const LoopVector& v) { return v.coeffs().norm(); }

double l2r_norm(const LoopVector& v, double r) {
  require_r(r, "l2r_norm");
  double sum = 0.0;
  for (int p = -v.bound(); p <= v.bound(); ++p) sum += std::pow(r, 2.0 * std::abs(p)) * v.mode(p).squaredNorm();
  return std::sqrt(sum);
}

LoopVector apply_D_s(const LoopVector& v, const ShiftData& s) {
  require_dim(v, s, "apply_D_s");
  return scale_modes(v, s, [](int p, double sj) { return cplx(0.0, p + sj); });
}

LoopVector apply_cos_r(const LoopVector& v, const ShiftData& s, double r) {
  require_r(r, "apply_cos_r");
  require_dim(v, s, "apply_cos_r");
  const double log_r = std::log(r);
  return scale_modes(v, s, [log_r](int p, double sj) { return cplx(std::cosh((p + sj) * log_r)); });
}

LoopVector apply_cos_r_inverse(const LoopVector& v, const ShiftData& s, double r) {
  require_r(r, "apply_cos_r_inverse");
  require_dim(v, s, "apply_cos_r_inverse");
  const double log_r = std::log(r);
  return scale_modes(v, s, [log_r](int p, double sj) { return cplx(1.0 / std::cosh((p + sj) * log_r)); });
}

LoopVector apply_J(const LoopVector& v) {
  LoopVector out(v.dim(), v.bound());
  for (int p = -v.bound(); p <= v.bound(); ++p) out.mode(p) = cplx(0.0, sign(p)) * v.mode(p);
  return out;
}

LoopVector apply_loop(const MatrixLoop& a, const LoopVector& v) {
  if (!a.is_square() || a.dim() != v.dim()) throw RejectedInput("apply_loop: dimension mismatch");
  const int bound = v.bound() + a.degree();
  LoopVector out(v.dim(), bound);
  for (const auto& [k, ak] : a.coeffs())
    for (int p = -v.bound(); p <= v.bound(); ++p) out.mode(p + k) += ak * v.mode(p);
  return out;
}

cplx l2r_inner_product(const LoopVector& a, const LoopVector& b, const ShiftData& s, double r) {
  if (a.bound() != b.bound()) throw RejectedInput("l2r_inner_product: mode bounds differ");
  const auto ca = apply_cos_r(a, s, r);
  const auto cb = apply_cos_r(b, s, r);
  cplx sum = 0.0;
  for (int p = -a.bound(); p <= a.bound(); ++p) sum += ca.mode(p).dot(cb.mode(p));
  return sum;
}

double hs_commutator_norm(const MatrixLoop& a) {
  if (!a.is_square()) throw RejectedInput("hs_commutator_norm: loop is not square");
  double sum = 0.0;
  for (const auto& [k, ak] : a.coeffs()) sum += 4.0 * std::abs(k) * ak.squaredNorm();
  return std::sqrt(sum);
}

std::vector<double> conjugated_hs_tail(const MatrixLoop& a, const ShiftData& s, double r, int bound) {
  require_r(r, "conjugated_hs_tail");
  if (!a.is_square() || a.dim() != s.dim()) throw RejectedInput("conjugated_hs_tail: dimension mismatch");
  if (bound < 0) throw RejectedInput("conjugated_hs_tail: negative bound");
  const double log_r = std::log(r);
  std::vector<Matrix> fwd, inv;
  for (int p = -bound; p <= bound; ++p) {
    fwd.push_back(cos_block(p, s, log_r, false));
    inv.push_back(cos_block(p, s, log_r, true));
  }
  // Squared Frobenius norm of block (p, q) of the commutator.
  auto block2 = [&](int p, int q) {
    const int factor = sign(q) - sign(p);
    if (factor == 0) return 0.0;
    auto it = a.coeffs().find(p - q);
    if (it == a.coeffs().end()) return 0.0;
    const Matrix blk = inv[p + bound] * it->second * fwd[q + bound];
    return factor * factor * blk.squaredNorm();
  };
  std::vector<double> partial;
  double sum = 0.0;
  for (int P = 0; P <= bound; ++P) {
    if (P == 0) {
      sum += block2(0, 0);
    } else {
      // New ring: rows or columns at |index| == P.
      for (int q = -P; q <= P; ++q) {
        sum += block2(P, q) + block2(-P, q);
      }
      for (int p = -P + 1; p <= P - 1; ++p) {
        sum += block2(p, P) + block2(p, -P);
      }
    }
    partial.push_back(std::sqrt(sum));
  }
  return partial;
}

void to_json(nlohmann::json& j, const LoopVector& v) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int p = -v.bound(); p <= v.bound(); ++p) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.dim(); ++i) {
      re.push_back(v.mode(p)(i).real());
      im.push_back(v.mode(p)(i).imag());
    }
    coeffs.push_back({{"p", p}, {"re", std::move(re)}, {"im", std::move(im)}});
  }
  j = {{"dim", v.dim()}, {"P", v.bound()}, {"coeffs", std::move(coeffs)}};
}

LoopVector loop_vector_from_json(const nlohmann::json& j) {
  const auto dim = j.at("dim").get<Eigen::Index>();
  const int bound = j.at("P").get<int>();
  LoopVector v(dim, bound);
  for (const auto& entry : j.at("coeffs")) {
    const int p = entry.at("p").get<int>();
    if (std::abs(p) > bound) throw RejectedInput("LoopVector JSON: mode outside the bound");
    const auto& re = entry.at("re");
    const auto& im = entry.at("im");
    if (static_cast<Eigen::Index>(re.size()) != dim || static_cast<Eigen::Index>(im.size()) != dim)
      throw RejectedInput("LoopVector JSON: coefficient length does not match dim");
    for (Eigen::Index i = 0; i < dim; ++i) v.mode(p)(i) = cplx(re.at(i).get<double>(), im.at(i).get<double>());
  }
  return v;
}

}  // namespace polyloop
