#ifndef MTASC_SPECTRUM_HPP
#define MTASC_SPECTRUM_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "mtasc/grid_eigensolver.hpp"
#include "mtasc/model.hpp"
#include "mtasc/types.hpp"

namespace mtasc {

struct SpectrumMetadata {
  std::string method;
  std::size_t n_traj = 0;
  std::size_t n_valid = 0;
  std::uint64_t seed = 0;
  std::string model_hash;
  std::size_t padding = 1;  // zero-padding factor of the time series
  double shift = 0.0;       // total translation applied to the energy axis
};

/// Power spectrum on the uniform axis E_k = e_min + k e_step.
struct SpectrumGrid {
  double e_min = 0.0;
  double e_step = 0.0;
  VectorXd intensity;
  SpectrumMetadata meta;

  std::size_t size() const { return static_cast<std::size_t>(intensity.size()); }
  double energy(std::size_t k) const { return e_min + static_cast<double>(k) * e_step; }
  double e_max() const { return energy(size() - 1); }
  VectorXd energies() const;
};

/// Bin width 2 pi hbar / (n_steps dt), divided by the padding factor.
double energy_step(std::size_t n_steps, double dt, std::size_t padding = 1);

/// E_0 + sum_i omega_i / 2, the energy subtracted for the plotted axis.
double zero_point_shift(const ModelSpec& model);

SpectrumGrid shift_energies(const SpectrumGrid& spec, double shift);
/// Translates the axis by -(E_0 + sum_i omega_i / 2).
SpectrumGrid shift_energies(const SpectrumGrid& spec, const ModelSpec& model);

/// Divides by the global maximum. Throws std::invalid_argument if nothing is positive.
SpectrumGrid normalize(const SpectrumGrid& spec);

/// Bins whose energy lies inside `range`. Throws std::invalid_argument on an empty intersection.
SpectrumGrid window(const SpectrumGrid& spec, Interval range);

void write_spectrum_csv(std::ostream& os, const SpectrumGrid& spec);
/// Inverse of write_spectrum_csv; the axis is rebuilt from e_min and e_step.
SpectrumGrid read_spectrum_csv(std::istream& is);

struct SpectrumComparison {
  double max_abs_diff = 0.0;
  std::size_t worst_bin = 0;
  // ||a - b||_2 / max(||a||_2, ||b||_2)
  double relative_l2 = 0.0;
};

/// Bin-by-bin comparison; the grids must share their axis.
SpectrumComparison compare_spectra(const SpectrumGrid& a, const SpectrumGrid& b);

}  // namespace mtasc

#endif  // MTASC_SPECTRUM_HPP
