#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>
#include <string>

namespace varstab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Central tolerances. Values are part of the library contract and are
// echoed into reports, so they live here rather than in each module.
namespace tol {
inline constexpr double kResidual = 1e-9;    // reference membership residual
inline constexpr double kActive = 1e-8;      // active-constraint detection
inline constexpr double kQp = 1e-10;         // active-set QP pivoting
inline constexpr double kKkt = 1e-9;         // KKT residual acceptance
inline constexpr double kProxResidual = 1e-8;
inline constexpr double kEig = 1e-9;         // positive-definiteness margin
inline constexpr double kDet = 1e-9;         // bordered determinant zero test
inline constexpr double kMfcqMargin = 1e-8;
inline constexpr double kPairFloor = 1e-6;   // hypomonotone pair distance floor
}  // namespace tol

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input data fails a schema or invariant check.
struct ValidationError : Error {
  using Error::Error;
};

// A feasible set turned out to be empty.
struct InfeasibleError : Error {
  using Error::Error;
};

// An iteration or enumeration limit was exceeded.
struct LimitError : Error {
  using Error::Error;
};

// A numeric routine could not certify its result.
struct NumericsError : Error {
  using Error::Error;
};

}  // namespace varstab
