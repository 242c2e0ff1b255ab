#ifndef MTASC_TYPES_HPP
#define MTASC_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace mtasc {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;
using VectorXcd = Vector<std::complex<double>>;
using MatrixXcd = Matrix<std::complex<double>>;
// Monodromy blocks are combined row-wise by the tangent map; keep rows contiguous.
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Complex = std::complex<double>;

// Atomic units throughout.
inline constexpr double kHbar = 1.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a numerical procedure cannot deliver its contract
/// (unresolved grid, singular Gaussian integral, unresolved phase).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtasc

#endif  // MTASC_TYPES_HPP
