#include "mtasc/job.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <ostream>

#include <Eigen/Core>

#ifndef MTASC_VERSION
#define MTASC_VERSION "0.0.0"
#endif

namespace mtasc {

namespace {

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

// Writes through a temporary so a failed run never leaves a truncated file behind.
template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp + "' for writing");
    writer(os);
    os.flush();
    if (!os) throw IoError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

}  // namespace

std::vector<std::string> build_versions() {
  return {std::string("mtasc=") + MTASC_VERSION,
          "eigen=" + std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
              std::to_string(EIGEN_MINOR_VERSION),
          std::string("compiler=") + __VERSION__, "cxx=" + std::to_string(__cplusplus)};
}

AnalysisResult analyze_spectrum(const SpectrumGrid& spec, const JobConfig& config, const ModelSpec& model) {
  const double w = model.morse().omega_e();
  AnalysisResult out;
  try {
    out.peaks = detect_peaks(spec, {config.threshold, config.min_separation * w});
  } catch (const std::invalid_argument& e) {
    throw NumericalError(std::string("analysis: ") + e.what());
  }
  const std::vector<double> ladder = uncoupled_ladder(model, config.n_levels, config.counter_term_form);
  assign_peaks(out.peaks, ladder, model.discretization().omega,
               {config.window * w, config.n_levels, config.bath_base_level});
  try {
    out.shifts = analyze_shifts(out.peaks, ladder, config.fit_max_n);
  } catch (const std::invalid_argument& e) {
    throw NumericalError(std::string("analysis: ") + e.what());
  }
  out.references.push_back(gas_phase_constants(model.morse()));
  if (model.counter_term_coefficient() != 0.0) {
    out.references.push_back(matching_constants(model, config.fit_max_n, config.counter_term_form));
  }
  return out;
}

void write_manifest(std::ostream& os, const JobConfig& config, const RunResult& run) {
  write_config(os, config);
  for (const auto& v : build_versions()) os << "# version " << v << '\n';
  os << "# wall_seconds=" << std::setprecision(6) << run.wall_seconds << '\n';
  const RunCounts& c = run.counts;
  os << "# trajectories n_traj=" << c.n_traj << ",n_valid=" << c.n_valid << ",n_invalid=" << c.n_invalid()
     << ",non_finite=" << c.n_non_finite << ",phase_unresolved=" << c.n_phase_unresolved
     << ",not_positive_definite=" << c.n_not_positive_definite << '\n';
}

JobResult run_job(const JobConfig& config, const JobOptions& options) {
  config.validate();
  const ModelSpec model = config.model();
  const ReferenceState ref = default_reference_state(model);
  const PropagationSettings prop = config.propagation();
  const EstimatorSettings est = config.estimator(model);

  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + config.out_dir + "': " + ec.message());

  write_file(join(config.out_dir, config.bath_file),
             [&](std::ostream& os) { write_bath_csv(os, model.discretization()); });

  if (!options.debug_traj_path.empty()) {
    const MixedSplit split = TrajectorySpectrum(ref, est).settings().split;
    const TrajectoryRecord rec =
        propagate(sample_initial_condition(ref, split, config.seed, 0), model, prop, ref.widths, false);
    write_file(options.debug_traj_path, [&](std::ostream& os) { write_trajectory_csv(os, rec); });
  }

  RunOptions run_options;
  run_options.n_traj = config.n_traj;
  run_options.seed = config.seed;
  run_options.workers = config.workers;
  run_options.block_size = config.block_size;
  const std::string scratch = join(config.out_dir, config.spectrum_file + ".scratch");
  if (config.checkpoint) run_options.scratch_path = scratch;
  if (options.progress) {
    run_options.progress = [](std::size_t done, std::size_t total) {
      std::fprintf(stderr, "\rtrajectories %zu/%zu", done, total);
      if (done == total) std::fputc('\n', stderr);
      std::fflush(stderr);
    };
  }

  JobResult result;
  try {
    result.run = run_estimator(model, ref, est, prop, run_options);
  } catch (const NumericalError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    // Raised only for a scratch file of another run or settings the config let through.
    throw ConfigError(e.what());
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  result.run.spectrum.meta.model_hash = model.hash();

  try {
    result.spectrum = normalize(shift_energies(result.run.spectrum, model));
  } catch (const std::invalid_argument& e) {
    throw NumericalError(std::string("spectrum: ") + e.what());
  }
  write_file(join(config.out_dir, config.spectrum_file),
             [&](std::ostream& os) { write_spectrum_csv(os, result.spectrum); });
  write_file(join(config.out_dir, config.manifest_file),
             [&](std::ostream& os) { write_manifest(os, config, result.run); });
  if (config.checkpoint) std::filesystem::remove(scratch, ec);

  result.analysis = analyze_spectrum(result.spectrum, config, model);
  write_file(join(config.out_dir, config.analysis_file), [&](std::ostream& os) {
    write_analysis_csv(os, result.analysis.shifts, result.analysis.peaks, result.analysis.references);
  });
  write_file(join(config.out_dir, config.plot_file), [&](std::ostream& os) {
    write_plot_script(os, config.spectrum_file, config.analysis_file, result.analysis.shifts);
  });
  return result;
}

}  // namespace mtasc
