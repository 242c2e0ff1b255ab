#include "mtasc/grid_eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mtasc/types.hpp"

namespace mtasc {

std::vector<double> grid_eigenvalues(const std::function<double(double)>& potential, double mass,
                                     Interval domain, std::size_t n_points, std::size_t n_levels) {
  if (n_points < 128) throw std::invalid_argument("grid_eigensolve: need at least 128 points");
  if (!(mass > 0.0)) throw std::invalid_argument("grid_eigensolve: mass must be positive");
  if (!(domain.hi > domain.lo)) throw std::invalid_argument("grid_eigensolve: empty domain");
  if (n_levels == 0 || n_levels >= n_points) {
    throw std::invalid_argument("grid_eigensolve: level count out of range for the grid");
  }

  const auto n = static_cast<Eigen::Index>(n_points);
  const double dx = domain.width() / static_cast<double>(n_points - 1);
  const double scale = 1.0 / (2.0 * mass * dx * dx);

  // Colbert-Miller sinc-DVR kinetic energy on (-inf, inf).
  MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d = static_cast<double>(i - j);
      const double t = scale * 2.0 / (d * d) * (((i - j) % 2 == 0) ? 1.0 : -1.0);
      h(i, j) = t;
      h(j, i) = t;
    }
    h(i, i) = scale * kPi * kPi / 3.0 + potential(domain.lo + dx * static_cast<double>(i));
  }

  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("grid_eigensolve: eigensolver failed");
  const VectorXd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + n_levels};
}

std::vector<double> grid_eigensolve(const std::function<double(double)>& potential, double mass,
                                    Interval domain, std::size_t n_levels,
                                    const GridSolveOptions& options) {
  std::size_t points = options.n_points;
  std::vector<double> coarse = grid_eigenvalues(potential, mass, domain, points, n_levels);
  double change = 0.0;
  while (2 * points - 1 <= options.max_points) {
    points = 2 * points - 1;  // halves the spacing, keeps the end points
    std::vector<double> fine = grid_eigenvalues(potential, mass, domain, points, n_levels);
    change = 0.0;
    for (std::size_t k = 0; k < n_levels; ++k) change = std::max(change, std::abs(fine[k] - coarse[k]));
    if (change <= options.tolerance) return fine;
    coarse = std::move(fine);
  }
  std::ostringstream msg;
  msg << "grid_eigensolve: levels not converged under grid doubling (last change " << change
      << " hartree at " << points << " points)";
  throw NumericalError(msg.str());
}

}  // namespace mtasc
