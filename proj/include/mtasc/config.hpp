#ifndef MTASC_CONFIG_HPP
#define MTASC_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtasc/model.hpp"
#include "mtasc/scivr.hpp"

namespace mtasc {

/// Malformed or inconsistent job configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DtMode { kStandard, kExplicit };

/// Everything a run needs. Defaults reproduce the 11-DOF resonant-bath study:
/// ten bath oscillators, omega_c = 0.5 omega_s, omega_max = omega_s, eta_eff = 0.5,
/// counter term on, separable mixed estimator with the Morse DOF in the HK set,
/// 10^4 trajectories, 2^14 steps of (2 pi / omega_e) / 20.
struct JobConfig {
  MorseParams morse;

  std::size_t bath_count = 10;
  double omega_c = 0.5;    // units of omega_s
  double omega_max = 1.0;  // units of omega_s
  double eta_eff = 0.5;
  bool counter_term = true;
  CounterTermForm counter_term_form = CounterTermForm::kHamiltonian;

  Method method = Method::kMixedSeparable;
  std::size_t n_traj = 10000;
  DtMode dt_mode = DtMode::kStandard;
  std::size_t n_steps = 16384;
  double dt = 0.0;  // only read in explicit mode
  std::uint64_t seed = 1;
  std::vector<Eigen::Index> hk = {0};
  std::size_t workers = 1;
  std::size_t substeps = 16;
  int order = 4;
  std::size_t t1_stride = 4;
  std::size_t padding = 1;
  std::optional<double> e_min;  // unset: one omega_e below the zero-point shift
  std::size_t block_size = 16;
  bool checkpoint = false;

  double threshold = 1e-5;
  double min_separation = 0.1;  // units of omega_e
  double window = 0.25;         // units of omega_e
  std::size_t n_levels = 5;
  std::size_t fit_max_n = 4;
  std::size_t bath_base_level = 1;

  std::string out_dir = ".";
  std::string bath_file = "bath.csv";
  std::string spectrum_file = "spectrum.csv";
  std::string analysis_file = "analysis.csv";
  std::string plot_file = "plot.gp";
  std::string manifest_file = "manifest.ini";

  ModelSpec model() const;
  /// Time step actually used: one twentieth of the harmonic period in standard mode.
  double time_step() const;
  std::size_t step_count() const;
  PropagationSettings propagation() const;
  /// Estimator settings with the split, grid and e_min resolved against `model`.
  EstimatorSettings estimator(const ModelSpec& model) const;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Parses `section.key = value` lines (or `key = value` under a `[section]` header).
/// Unknown keys, repeated keys and unparsable values throw ConfigError; keys not
/// given keep their defaults.
JobConfig parse_config(std::istream& is);
JobConfig load_config(const std::string& path);

/// Writes every key with its current value; parse_config of the output
/// reproduces `config`.
void write_config(std::ostream& os, const JobConfig& config);

struct ConfigKeyDoc {
  std::string key;
  std::string default_value;
  std::string description;
};

/// All keys with defaults and descriptions.
std::vector<ConfigKeyDoc> config_documentation();

}  // namespace mtasc

#endif  // MTASC_CONFIG_HPP
