#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dimcat {

using Complex = std::complex<double>;

// Global numerical tolerances. Matrices in this library are tiny, so plain
// double precision with fixed thresholds is enough. Both values can be
// overridden at runtime (the CLI exposes --tol).
struct Tolerances {
  double equality = 1e-9;   // residuals of algebraic identities
  double spectral = 1e-7;   // eigenvalue / singular-value decisions
};

inline Tolerances& tol() {
  static Tolerances t;
  return t;
}

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dimcat
