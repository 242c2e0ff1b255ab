#ifndef MTASC_GRID_EIGENSOLVER_HPP
#define MTASC_GRID_EIGENSOLVER_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace mtasc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct GridSolveOptions {
  std::size_t n_points = 384;
  double tolerance = 1e-9;        // hartree, between successive grid doublings
  std::size_t max_points = 4096;
};

/// Lowest eigenvalues of -1/(2m) d2/ds2 + V(s) on a uniform grid with a dense
/// sinc-DVR kinetic matrix. The grid spacing is halved until two successive
/// solutions agree to `tolerance`; throws NumericalError otherwise.
std::vector<double> grid_eigensolve(const std::function<double(double)>& potential, double mass,
                                    Interval domain, std::size_t n_levels,
                                    const GridSolveOptions& options = {});

/// Single dense solve at a fixed grid, no refinement.
std::vector<double> grid_eigenvalues(const std::function<double(double)>& potential, double mass,
                                     Interval domain, std::size_t n_points, std::size_t n_levels);

}  // namespace mtasc

#endif  // MTASC_GRID_EIGENSOLVER_HPP
