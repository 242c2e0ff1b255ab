#include "mtasc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>

#include <CLI11.hpp>

#include "mtasc/spectrum.hpp"

namespace mtasc {

namespace {

constexpr std::size_t kStandardSteps = 16384;

// Shortest text that parses back to the same double.
std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const std::string& single(const std::string& key, const std::vector<std::string>& in) {
  if (in.size() != 1) throw ConfigError("config: '" + key + "' takes a single value");
  return in.front();
}

double to_double(const std::string& key, const std::vector<std::string>& in) {
  const std::string& s = single(key, in);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + s + "'");
  }
  return v;
}

template <typename T>
T to_unsigned(const std::string& key, const std::vector<std::string>& in) {
  const std::string& s = single(key, in);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::vector<std::string>& in) {
  const std::string& s = single(key, in);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + s + "'");
}

struct KeySpec {
  std::string key;
  std::string description;
  std::function<void(JobConfig&, const std::string&, const std::vector<std::string>&)> set;
  std::function<std::string(const JobConfig&)> get;
};

#define MTASC_DOUBLE_KEY(name, field, doc)                                                              \
  KeySpec {                                                                                           \
    name, doc, [](JobConfig& c, const std::string& k, const auto& v) { c.field = to_double(k, v); }, \
        [](const JobConfig& c) { return format_double(c.field); }                                     \
  }
#define MTASC_SIZE_KEY(name, field, doc)                                                                           \
  KeySpec {                                                                                                      \
    name, doc, [](JobConfig& c, const std::string& k, const auto& v) { c.field = to_unsigned<std::size_t>(k, v); }, \
        [](const JobConfig& c) { return std::to_string(c.field); }                                               \
  }
#define MTASC_STRING_KEY(name, field, doc)                                                         \
  KeySpec {                                                                                      \
    name, doc, [](JobConfig& c, const std::string& k, const auto& v) { c.field = single(k, v); }, \
        [](const JobConfig& c) { return c.field; }                                               \
  }

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      MTASC_DOUBLE_KEY("model.de", morse.dissociation_energy, "Morse well depth D_e (hartree)"),
      MTASC_DOUBLE_KEY("model.alpha", morse.range, "Morse range parameter alpha (1/bohr)"),
      MTASC_DOUBLE_KEY("model.s_eq", morse.equilibrium, "Morse equilibrium distance s_eq (bohr)"),
      MTASC_DOUBLE_KEY("model.mass", morse.mass, "system mass m_s (electron masses)"),
      MTASC_SIZE_KEY("bath.count", bath_count, "number of bath oscillators F_b"),
      MTASC_DOUBLE_KEY("bath.omega_c", omega_c, "cutoff frequency in units of omega_s = omega_e"),
      MTASC_DOUBLE_KEY("bath.omega_max", omega_max, "largest bath frequency in units of omega_s"),
      MTASC_DOUBLE_KEY("bath.eta_eff", eta_eff, "coupling eta / (m_s omega_s)"),
      KeySpec{"bath.counter_term", "include the counter term in the Hamiltonian (true/false)",
              [](JobConfig& c, const std::string& k, const auto& v) { c.counter_term = to_bool(k, v); },
              [](const JobConfig& c) { return std::string(c.counter_term ? "true" : "false"); }},
      KeySpec{"bath.counter_term_form",
              "coefficient of the 1D reference ladder: hamiltonian (sum c_i^2 / 2 omega_i^2) or printed",
              [](JobConfig& c, const std::string& k, const auto& v) {
                const std::string& s = single(k, v);
                if (s == "hamiltonian") {
                  c.counter_term_form = CounterTermForm::kHamiltonian;
                } else if (s == "printed") {
                  c.counter_term_form = CounterTermForm::kPrinted;
                } else {
                  throw ConfigError("config: '" + k + "' expects hamiltonian or printed");
                }
              },
              [](const JobConfig& c) {
                return std::string(c.counter_term_form == CounterTermForm::kPrinted ? "printed" : "hamiltonian");
              }},
      KeySpec{"run.method", "estimator: ta-sep, ta-full, mixed-sep or mixed-full",
              [](JobConfig& c, const std::string& k, const auto& v) {
                try {
                  c.method = parse_method(single(k, v));
                } catch (const ConfigError&) {
                  throw;
                } catch (const std::invalid_argument& e) {
                  throw ConfigError(std::string("config: ") + e.what());
                }
              },
              [](const JobConfig& c) { return std::string(to_string(c.method)); }},
      MTASC_SIZE_KEY("run.n_traj", n_traj, "number of Monte Carlo trajectories"),
      KeySpec{"run.dt_mode", "standard: dt = (2 pi / omega_e) / 20 and 2^14 steps; explicit: run.dt and run.n_steps",
              [](JobConfig& c, const std::string& k, const auto& v) {
                const std::string& s = single(k, v);
                if (s == "standard") {
                  c.dt_mode = DtMode::kStandard;
                } else if (s == "explicit") {
                  c.dt_mode = DtMode::kExplicit;
                } else {
                  throw ConfigError("config: '" + k + "' expects standard or explicit");
                }
              },
              [](const JobConfig& c) { return std::string(c.dt_mode == DtMode::kStandard ? "standard" : "explicit"); }},
      MTASC_SIZE_KEY("run.n_steps", n_steps, "saved time steps N (fixed to 16384 in standard mode)"),
      MTASC_DOUBLE_KEY("run.dt", dt, "time step (atomic units); explicit mode only"),
      KeySpec{"run.seed", "Monte Carlo seed",
              [](JobConfig& c, const std::string& k, const auto& v) { c.seed = to_unsigned<std::uint64_t>(k, v); },
              [](const JobConfig& c) { return std::to_string(c.seed); }},
      KeySpec{"run.hk", "comma-separated DOF indices treated with HK (0 is the system); empty for none",
              [](JobConfig& c, const std::string& k, const auto& v) {
                c.hk.clear();
                for (const auto& item : v) {
                  if (item.empty()) continue;
                  c.hk.push_back(static_cast<Eigen::Index>(to_unsigned<std::size_t>(k, {item})));
                }
              },
              [](const JobConfig& c) {
                std::string out;
                for (std::size_t i = 0; i < c.hk.size(); ++i) out += (i ? "," : "") + std::to_string(c.hk[i]);
                return out;
              }},
      MTASC_SIZE_KEY("run.workers", workers, "worker threads; the result does not depend on it"),
      MTASC_SIZE_KEY("run.substeps", substeps, "integrator substeps per saved step"),
      KeySpec{"run.order", "integrator order: 2 (position Verlet) or 4 (triple-jump composition)",
              [](JobConfig& c, const std::string& k, const auto& v) {
                c.order = static_cast<int>(to_unsigned<unsigned>(k, v));
              },
              [](const JobConfig& c) { return std::to_string(c.order); }},
      MTASC_SIZE_KEY("run.t1_stride", t1_stride, "outer-time decimation of the double-time estimators"),
      MTASC_SIZE_KEY("run.padding", padding, "zero-padding factor of the transform"),
      KeySpec{"run.e_min", "lowest energy of the spectrum (hartree) or auto",
              [](JobConfig& c, const std::string& k, const auto& v) {
                if (single(k, v) == "auto") {
                  c.e_min.reset();
                } else {
                  c.e_min = to_double(k, v);
                }
              },
              [](const JobConfig& c) { return c.e_min ? format_double(*c.e_min) : std::string("auto"); }},
      MTASC_SIZE_KEY("run.block_size", block_size, "trajectories per reduction block (fixes the summation order)"),
      KeySpec{"run.checkpoint", "keep a resumable running sum in the output directory (true/false)",
              [](JobConfig& c, const std::string& k, const auto& v) { c.checkpoint = to_bool(k, v); },
              [](const JobConfig& c) { return std::string(c.checkpoint ? "true" : "false"); }},
      MTASC_DOUBLE_KEY("analysis.threshold", threshold, "peak threshold relative to the maximum"),
      MTASC_DOUBLE_KEY("analysis.min_separation", min_separation, "minimum peak separation in units of omega_e"),
      MTASC_DOUBLE_KEY("analysis.window", window, "assignment window around each level in units of omega_e"),
      MTASC_SIZE_KEY("analysis.n_levels", n_levels, "system levels to assign"),
      MTASC_SIZE_KEY("analysis.fit_max_n", fit_max_n, "largest n used by the Birge-Sponer and parabola fits"),
      MTASC_SIZE_KEY("analysis.bath_base_level", bath_base_level,
                     "system level whose peak the bath lines are measured from"),
      MTASC_STRING_KEY("output.dir", out_dir, "output directory"),
      MTASC_STRING_KEY("output.bath", bath_file, "bath table file name"),
      MTASC_STRING_KEY("output.spectrum", spectrum_file, "spectrum file name"),
      MTASC_STRING_KEY("output.analysis", analysis_file, "analysis report file name"),
      MTASC_STRING_KEY("output.plot", plot_file, "gnuplot script file name"),
      MTASC_STRING_KEY("output.manifest", manifest_file, "manifest file name"),
  };
  return table;
}

#undef MTASC_DOUBLE_KEY
#undef MTASC_SIZE_KEY
#undef MTASC_STRING_KEY

}  // namespace

ModelSpec JobConfig::model() const {
  return ModelSpec(morse, make_bath(morse, bath_count, omega_c, omega_max, eta_eff, counter_term));
}

double JobConfig::time_step() const {
  return dt_mode == DtMode::kStandard ? 2.0 * kPi / morse.omega_e() / 20.0 : dt;
}

std::size_t JobConfig::step_count() const { return dt_mode == DtMode::kStandard ? kStandardSteps : n_steps; }

PropagationSettings JobConfig::propagation() const {
  PropagationSettings p;
  p.n_steps = step_count();
  p.dt = time_step();
  p.substeps = substeps;
  p.order = order;
  return p;
}

EstimatorSettings JobConfig::estimator(const ModelSpec& model) const {
  EstimatorSettings s;
  s.method = method;
  s.split = MixedSplit::from_hk(model.dof(), hk);
  s.n_steps = step_count();
  s.dt = time_step();
  s.padding = padding;
  s.t1_stride = t1_stride;
  if (e_min) {
    s.e_min = *e_min;
  } else {
    // One omega_e below the zero-point shift, on the lattice of the energy step.
    const double step = s.e_step();
    s.e_min = std::floor((zero_point_shift(model) - morse.omega_e()) / step) * step;
  }
  return s;
}

void JobConfig::validate() const {
  try {
    morse.validate();
    if (dt_mode == DtMode::kStandard && (n_steps != kStandardSteps || dt != 0.0)) {
      throw ConfigError("config: run.dt and run.n_steps are fixed in standard mode; use run.dt_mode = explicit");
    }
    if (dt_mode == DtMode::kExplicit && !(dt > 0.0)) throw ConfigError("config: run.dt must be positive");
    if (n_traj == 0) throw ConfigError("config: run.n_traj must be positive");
    if (workers == 0) throw ConfigError("config: run.workers must be positive");
    if (block_size == 0) throw ConfigError("config: run.block_size must be positive");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("config: analysis.threshold must be in (0, 1)");
    if (!(min_separation >= 0.0)) throw ConfigError("config: analysis.min_separation must be non-negative");
    if (!(window > 0.0)) throw ConfigError("config: analysis.window must be positive");
    if (n_levels < 2) throw ConfigError("config: analysis.n_levels must be at least 2");
    if (fit_max_n < 2) throw ConfigError("config: analysis.fit_max_n must be at least 2");
    if (n_levels > morse.bound_state_count()) throw ConfigError("config: analysis.n_levels exceeds the bound states");
    const ModelSpec m = model();
    propagation().validate();
    estimator(m).validate(m.dof());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

JobConfig parse_config(std::istream& is) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(is);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  JobConfig config;
  std::set<std::string> seen;
  const auto& table = key_table();
  for (const auto& item : items) {
    if (item.name == "--" || item.name == "++") continue;  // section markers
    const std::string key = item.fullname();
    const auto spec = std::find_if(table.begin(), table.end(), [&](const KeySpec& k) { return k.key == key; });
    if (spec == table.end()) throw ConfigError("config: unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("config: key '" + key + "' given twice");
    spec->set(config, key, item.inputs.empty() ? std::vector<std::string>{""} : item.inputs);
  }
  return config;
}

JobConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file '" + path + "'");
  return parse_config(is);
}

void write_config(std::ostream& os, const JobConfig& config) {
  for (const auto& spec : key_table()) {
    if (spec.key == "run.dt" && config.dt_mode == DtMode::kStandard) continue;
    os << spec.key << " = " << spec.get(config) << '\n';
  }
}

std::vector<ConfigKeyDoc> config_documentation() {
  const JobConfig defaults;
  std::vector<ConfigKeyDoc> out;
  for (const auto& spec : key_table()) {
    out.push_back({spec.key, spec.key == "run.dt" ? std::string("(unset)") : spec.get(defaults), spec.description});
  }
  return out;
}

}  // namespace mtasc
