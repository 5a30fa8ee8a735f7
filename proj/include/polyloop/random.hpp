#pragma once

// Seeded generators for random group elements and Lie-algebra elements.
// Identical seeds give bit-identical draws within one build.

#include <cstdint>
#include <random>

#include "polyloop/spectral.hpp"

namespace polyloop {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  int integer(int lo, int hi);  ///< inclusive range

  RealMatrix real_gaussian(Eigen::Index rows, Eigen::Index cols);
  Matrix gaussian(Eigen::Index rows, Eigen::Index cols);
  Vector unit_vector(Eigen::Index n);

  /// Haar-distributed elements (QR of a Gaussian matrix with phase fix).
  Matrix unitary(Eigen::Index n);
  Matrix special_unitary(Eigen::Index n);
  RealMatrix special_orthogonal(Eigen::Index n);

  SkewMatrix skew(Eigen::Index n, double scale = 1.0);
  SkewMatrix real_skew(Eigen::Index n, double scale = 1.0);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace polyloop
