#ifndef MTASC_ANALYSIS_HPP
#define MTASC_ANALYSIS_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mtasc/model.hpp"
#include "mtasc/spectrum.hpp"
#include "mtasc/types.hpp"

namespace mtasc {

enum class PeakKind { kUnassigned, kSystem, kBathFundamental, kBathOvertone };

const char* to_string(PeakKind kind);

struct Peak {
  double energy = 0.0;  // absolute, i.e. grid energy plus the recorded axis shift
  double height = 0.0;  // relative to the spectrum maximum
  PeakKind kind = PeakKind::kUnassigned;
  // System level n, or the 0-based bath mode of a fundamental. Unused otherwise.
  std::size_t index = 0;
};

/// Peaks ordered by strictly increasing energy.
struct PeakList {
  std::vector<Peak> peaks;

  std::size_t size() const { return peaks.size(); }
  /// Assigned system peak of level n, if any.
  const Peak* system(std::size_t n) const;
  /// Assigned fundamental of bath mode i, if any.
  const Peak* bath_fundamental(std::size_t i) const;
  std::size_t system_count() const;
};

struct PeakOptions {
  double threshold = 1e-5;     // relative to the maximum
  double min_separation = 0.0; // energy; closer maxima keep only the taller one
};

/// Local maxima above `threshold` of the maximum, refined by a three-point parabola.
/// Throws std::invalid_argument if no bin exceeds the threshold.
PeakList detect_peaks(const SpectrumGrid& spec, const PeakOptions& options);

struct AssignmentOptions {
  double window = 0.0;  // system peaks must lie within this distance of their level
  std::size_t n_levels = 5;
  // System level whose peak the bath lines are measured from.
  std::size_t bath_base_level = 1;
};

/// Tags system peaks by proximity to `ladder` (absolute energies, level n at index n)
/// and bath fundamentals by proximity to the base system peak plus omega_i. Each
/// level takes the closest peak, the taller one on a tie. Lines omega_i + omega_j
/// above the base peak are tagged as overtones.
void assign_peaks(PeakList& peaks, const std::vector<double>& ladder, const VectorXd& bath_omega,
                  const AssignmentOptions& options);

/// Levels of the matching uncoupled problem, E_n + sum_i omega_i / 2, with E_n the
/// counter-term renormalised levels when the counter term is on.
std::vector<double> uncoupled_ladder(const ModelSpec& model, std::size_t n_levels,
                                     CounterTermForm form = CounterTermForm::kHamiltonian);
double uncoupled_reference(const ModelSpec& model, std::size_t n);

/// Detection and assignment with the default options of the model: threshold 1e-5,
/// separation 0.1 omega_e, window 0.25 omega_e, bath lines above the n = 1 peak.
PeakList analyze_peaks(const SpectrumGrid& spec, const ModelSpec& model, std::size_t n_levels = 5);

struct ShiftRow {
  std::size_t n = 0;
  double e_coup = 0.0;
  double e_ref = 0.0;
  double e_plot = 0.0;  // e_coup - e_ref
};

enum class ShiftTrend { kBlueshift, kRedshift, kMixed };

const char* to_string(ShiftTrend trend);

/// Least-squares line y = intercept + slope x through (n, E_n - E_{n-1}).
/// omega_e = intercept and omega_e x_e = -slope / 2.
struct BirgeSponerFit {
  std::vector<std::size_t> n;
  VectorXd differences;
  double intercept = 0.0;
  double slope = 0.0;
  VectorXd residuals;

  double omega_e() const { return intercept; }
  double omega_e_x_e() const { return -0.5 * slope; }
  double rms() const;
};

/// Least-squares E_plot = c0 + c1 (n + 1/2) + c2 (n + 1/2)^2.
struct ParabolaFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  VectorXd residuals;

  double delta_omega_e() const { return c1; }
  double delta_omega_e_x_e() const { return -c2; }
  double bath_offset() const { return -c0; }
  double rms() const;
};

struct ShiftAnalysis {
  std::vector<ShiftRow> rows;
  ShiftTrend trend = ShiftTrend::kMixed;
  std::optional<BirgeSponerFit> birge_sponer;
  std::optional<ParabolaFit> parabola;
};

/// E_plot per assigned system level. Throws std::invalid_argument with fewer than two.
std::vector<ShiftRow> shift_table(const PeakList& peaks, const std::vector<double>& ladder);

/// Fit over differences n = 1..max_n whose two levels are both present.
/// Throws std::invalid_argument with fewer than two differences.
BirgeSponerFit birge_sponer(const std::vector<std::pair<std::size_t, double>>& levels, std::size_t max_n = 4);
BirgeSponerFit birge_sponer(const PeakList& peaks, std::size_t max_n = 4);

/// Throws std::invalid_argument with fewer than three rows.
ParabolaFit parabola_fit(const std::vector<ShiftRow>& rows);

ShiftTrend classify_trend(const std::vector<ShiftRow>& rows);

/// Shift table plus whichever fits the assigned peaks support.
ShiftAnalysis analyze_shifts(const PeakList& peaks, const std::vector<double>& ladder, std::size_t max_n = 4);

/// Spectroscopic constants a fit is compared against.
struct ReferenceConstants {
  std::string label;
  double omega_e = 0.0;
  double omega_e_x_e = 0.0;
};

/// Constants of the isolated Morse oscillator.
ReferenceConstants gas_phase_constants(const MorseParams& morse);
/// Constants of the matching 1D problem: the gas phase without a counter term,
/// otherwise a Birge-Sponer fit of the renormalised levels 0..max_n.
ReferenceConstants matching_constants(const ModelSpec& model, std::size_t max_n = 4,
                                      CounterTermForm form = CounterTermForm::kHamiltonian);

/// Columns n,E_coup_au,E_ref_au,E_plot_au followed by '#' lines with the fits,
/// their differences from each reference, and the peak list.
void write_analysis_csv(std::ostream& os, const ShiftAnalysis& analysis, const PeakList& peaks,
                        const std::vector<ReferenceConstants>& references);

/// gnuplot program plotting the spectrum, the shift curve and the Birge-Sponer line.
void write_plot_script(std::ostream& os, const std::string& spectrum_csv, const std::string& analysis_csv,
                       const ShiftAnalysis& analysis);

}  // namespace mtasc

#endif  // MTASC_ANALYSIS_HPP
