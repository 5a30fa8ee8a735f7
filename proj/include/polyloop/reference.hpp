#pragma once

// Independent reference computations used to check the library: brute-force
// operator matrices, direct (non-FFT) Fourier sums, Bessel-series tails,
// Pade exponentials and closed forms for the latitude circle.

#include <functional>

#include "polyloop/holonomy.hpp"
#include "polyloop/sequence_spaces.hpp"

namespace polyloop::reference {

/// ||[M_a, J]||_HS from the dense matrix of M_a on modes |p| <= bound.
/// Exact once bound >= deg(a), since every non-zero entry has |p|, |q| <= deg(a).
double brute_force_hs(const MatrixLoop& a, int bound);

/// Dense matrix of C^{-1} M_a C, C = cos_r D_s, truncated to modes |p| <= bound,
/// and the Hilbert-Schmidt norm of its commutator with J.
double brute_force_conjugated_hs(const MatrixLoop& a, const ShiftData& s, double r, int bound);

/// Coefficient c_k of f by an O(N) direct sum on `grid` points.
Matrix direct_coefficient(const std::function<Matrix(double)>& f, int k, int grid);

/// Normalised tail sqrt(sum_{|k|>degree} |c_k|^2) / sqrt(sum |c_k|^2) by
/// direct summation of all coefficients |k| < grid/2.
double direct_tail(const std::function<Matrix(double)>& f, int degree, int grid);

/// Tail of exp(2 pi i (shift t + a sin 2 pi t) / 2 pi) = sum_m J_m(a) z^{shift+m}
/// beyond |k| > degree (Jacobi-Anger).  The total mass is 1.
double jacobi_anger_tail(double a, int shift, int degree);

/// Tail of exp(c sin 2 pi t) beyond |k| > degree; |c_k| = I_k(c).
double modified_bessel_tail(double c, int degree);
/// Total l2 mass of exp(c sin 2 pi t): sqrt(I_0(2c)).
double modified_bessel_total(double c);

/// Scaling-and-squaring Pade exponential.
Matrix pade_exp(const Matrix& a);

/// Frame transported around the latitude circle theta with winding w:
/// exp(-2 pi w cos(theta) t J0).
RealMatrix latitude_frame(double theta, int winding, double t);
/// Rotation angle of the latitude holonomy, 2 pi (1 - cos theta) w reduced to [0, 2 pi).
double latitude_angle(double theta, int winding);

/// Rotation angle of a 2x2 rotation matrix in [0, 2 pi).
double rotation_angle(const RealMatrix& g);

}  // namespace polyloop::reference
