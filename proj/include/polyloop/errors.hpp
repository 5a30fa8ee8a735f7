#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace polyloop {

// Input violates a documented precondition (dimension mismatch, r <= 1, ...).
class RejectedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A logarithm branch was requested on a matrix with an eigenvalue on the cut.
class BranchCutError : public RejectedInput {
 public:
  BranchCutError(const std::string& what, std::complex<double> eigenvalue)
      : RejectedInput(what), eigenvalue_(eigenvalue) {}
  std::complex<double> eigenvalue() const { return eigenvalue_; }

 private:
  std::complex<double> eigenvalue_;
};

// Numerical procedure failed to reach its stated accuracy.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace polyloop
