#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace soficize {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Numerical tolerances, sized for double precision at d <= 4096.
inline constexpr double kGramTol = 1e-9;      // Gram(frame) - I, max entry
inline constexpr double kUnitaryTol = 1e-8;   // ||u*u - I||_op acceptance
inline constexpr double kEigTol = 1e-8;       // eigenpair residual
inline constexpr double kMassTol = 1e-12;     // probability mass bookkeeping
inline constexpr double kMergeTol = 1e-12;    // atom positions treated as equal
inline constexpr double kSingularFloor = 1e-12;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape/arity mismatches, missing map entries, malformed inputs.
struct StructuralError : Error {
  using Error::Error;
};

// Arguments outside an operation's mathematical domain.
struct DomainError : Error {
  using Error::Error;
};

// Input fails a quantitative validity check; carries the measured defect.
struct ValidationError : Error {
  double defect;
  ValidationError(const std::string& what, double defect_)
      : Error(what), defect(defect_) {}
};

// Numerically degenerate input (singular Gram, rank collapse).
struct DegeneracyError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace soficize
