// Command-line front end. Standard output carries only machine-readable results;
// progress and diagnostics go to standard error.
//
// Exit codes: 0 success, 1 compare tolerance exceeded, 2 invalid configuration
// or usage, 3 numerical failure, 4 I/O failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mtasc/analysis.hpp"
#include "mtasc/config.hpp"
#include "mtasc/job.hpp"
#include "mtasc/model.hpp"
#include "mtasc/spectrum.hpp"

namespace {

constexpr int kExitTolerance = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> method;
  std::optional<std::string> out_dir;
};

void add_config_option(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "job configuration file (defaults when omitted)");
}

void add_run_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--seed", o.seed, "override run.seed");
  app->add_option("--workers", o.workers, "override run.workers");
  app->add_option("--method", o.method, "override run.method (ta-sep, ta-full, mixed-sep, mixed-full)");
  app->add_option("--out-dir", o.out_dir, "override output.dir");
}

mtasc::JobConfig resolve(const Overrides& o) {
  mtasc::JobConfig config = o.config_path.empty() ? mtasc::JobConfig{} : mtasc::load_config(o.config_path);
  if (o.seed) config.seed = *o.seed;
  if (o.workers) config.workers = *o.workers;
  if (o.method) {
    try {
      config.method = mtasc::parse_method(*o.method);
    } catch (const std::invalid_argument& e) {
      throw mtasc::ConfigError(e.what());
    }
  }
  if (o.out_dir) config.out_dir = *o.out_dir;
  config.validate();
  return config;
}

mtasc::SpectrumGrid read_spectrum(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw mtasc::IoError("cannot read spectrum file '" + path + "'");
  try {
    return mtasc::read_spectrum_csv(is);
  } catch (const std::invalid_argument& e) {
    throw mtasc::IoError(path + ": " + e.what());
  }
}

template <class Writer>
void write_to(const std::string& path, Writer&& writer) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw mtasc::IoError("cannot open '" + path + "' for writing");
  writer(os);
  if (!os) throw mtasc::IoError("write to '" + path + "' failed");
}

int run_command(const Overrides& o, const std::string& debug_traj) {
  const mtasc::JobConfig config = resolve(o);
  mtasc::JobOptions options;
  options.debug_traj_path = debug_traj;
  const mtasc::JobResult r = mtasc::run_job(config, options);
  const auto& c = r.run.counts;
  std::cout << "out_dir=" << config.out_dir << '\n'
            << "n_traj=" << c.n_traj << '\n'
            << "n_valid=" << c.n_valid << '\n'
            << "n_invalid=" << c.n_invalid() << '\n'
            << "trend=" << mtasc::to_string(r.analysis.shifts.trend) << '\n';
  std::cout << std::setprecision(17);
  if (r.analysis.shifts.birge_sponer) {
    std::cout << "omega_e_fit=" << r.analysis.shifts.birge_sponer->omega_e() << '\n'
              << "omega_e_x_e_fit=" << r.analysis.shifts.birge_sponer->omega_e_x_e() << '\n';
  }
  return 0;
}

int analyze_command(const Overrides& o, const std::string& spectrum_path) {
  const mtasc::JobConfig config = resolve(o);
  const mtasc::ModelSpec model = config.model();
  const mtasc::SpectrumGrid spec = read_spectrum(spectrum_path);
  const mtasc::AnalysisResult a = mtasc::analyze_spectrum(spec, config, model);
  std::filesystem::create_directories(config.out_dir);
  const auto dir = std::filesystem::path(config.out_dir);
  write_to((dir / config.analysis_file).string(),
           [&](std::ostream& os) { mtasc::write_analysis_csv(os, a.shifts, a.peaks, a.references); });
  write_to((dir / config.plot_file).string(), [&](std::ostream& os) {
    mtasc::write_plot_script(os, std::filesystem::path(spectrum_path).filename().string(), config.analysis_file,
                             a.shifts);
  });
  mtasc::write_analysis_csv(std::cout, a.shifts, a.peaks, a.references);
  return 0;
}

int morse_levels_command(const Overrides& o, std::size_t n) {
  const mtasc::JobConfig config = resolve(o);
  if (n == 0 || n > config.morse.bound_state_count()) {
    throw mtasc::ConfigError("oracle morse-levels: --n must be between 1 and the bound-state count");
  }
  const std::vector<double> grid = mtasc::grid_morse_levels(config.morse, n);
  double worst = 0.0;
  std::cout << std::setprecision(17) << "n,analytic_au,grid_au,abs_diff_au\n";
  for (std::size_t k = 0; k < n; ++k) {
    const double exact = mtasc::morse_level(k, config.morse);
    const double diff = std::abs(grid[k] - exact);
    worst = std::max(worst, diff);
    std::cout << k << ',' << exact << ',' << grid[k] << ',' << diff << '\n';
  }
  std::cout << "# max_abs_diff=" << worst << '\n';
  return 0;
}

int compare_command(const std::string& a_path, const std::string& b_path, double tolerance) {
  const mtasc::SpectrumGrid a = read_spectrum(a_path);
  const mtasc::SpectrumGrid b = read_spectrum(b_path);
  mtasc::SpectrumComparison c;
  try {
    c = mtasc::compare_spectra(a, b);
  } catch (const std::invalid_argument& e) {
    throw mtasc::ConfigError(e.what());
  }
  const bool ok = c.max_abs_diff <= tolerance;
  std::cout << std::setprecision(17) << "max_abs_diff=" << c.max_abs_diff << '\n'
            << "worst_bin=" << c.worst_bin << '\n'
            << "worst_energy_au=" << a.energy(c.worst_bin) << '\n'
            << "relative_l2=" << c.relative_l2 << '\n'
            << "tolerance=" << tolerance << '\n'
            << "within_tolerance=" << (ok ? "true" : "false") << '\n';
  return ok ? 0 : kExitTolerance;
}

int defaults_command() {
  for (const auto& doc : mtasc::config_documentation()) {
    std::cout << "; " << doc.description << '\n';
    if (doc.default_value == "(unset)") {
      std::cout << "; " << doc.key << " =\n";
    } else {
      std::cout << doc.key << " = " << doc.default_value << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed time-averaged semiclassical spectra of a Morse oscillator in a harmonic bath"};
  app.require_subcommand(1);

  Overrides o;
  std::string debug_traj;
  auto* run = app.add_subcommand("run", "propagate, estimate and analyze; write all artifacts to the output directory");
  add_config_option(run, o);
  add_run_overrides(run, o);
  run->add_option("--debug-traj", debug_traj, "also dump the first trajectory (step,t,E,S,phi,abs_C) to this file");

  auto* bath = app.add_subcommand("discretize-bath", "print the bath table i,omega_au,c_au");
  add_config_option(bath, o);

  std::string spectrum_path;
  auto* analyze = app.add_subcommand("analyze", "peak assignment and fits of an existing spectrum file");
  add_config_option(analyze, o);
  analyze->add_option("--out-dir", o.out_dir, "override output.dir");
  analyze->add_option("--spectrum", spectrum_path, "spectrum CSV written by run")->required();

  auto* oracle = app.add_subcommand("oracle", "reference calculations");
  oracle->require_subcommand(1);
  std::size_t n_levels = 5;
  auto* levels = oracle->add_subcommand("morse-levels", "analytic against grid-solved Morse levels");
  add_config_option(levels, o);
  levels->add_option("--n", n_levels, "number of levels")->capture_default_str();

  std::string a_path;
  std::string b_path;
  double tolerance = 0.0;
  auto* compare = app.add_subcommand("compare", "bin-by-bin comparison of two spectrum files");
  compare->add_option("a", a_path, "first spectrum")->required();
  compare->add_option("b", b_path, "second spectrum")->required();
  compare->add_option("--tolerance", tolerance, "largest accepted absolute difference per bin")->capture_default_str();

  app.add_subcommand("defaults", "print every configuration key with its default and description");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return run_command(o, debug_traj);
    if (*bath) {
      mtasc::write_bath_csv(std::cout, resolve(o).model().discretization());
      return 0;
    }
    if (*analyze) return analyze_command(o, spectrum_path);
    if (*levels) return morse_levels_command(o, n_levels);
    if (*compare) return compare_command(a_path, b_path, tolerance);
    return defaults_command();
  } catch (const mtasc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mtasc::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const mtasc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
