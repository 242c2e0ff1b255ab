#ifndef MTASC_JOB_HPP
#define MTASC_JOB_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mtasc/analysis.hpp"
#include "mtasc/config.hpp"
#include "mtasc/driver.hpp"

namespace mtasc {

/// Library version and the versions it was built against, one `name=value` per entry.
std::vector<std::string> build_versions();

struct AnalysisResult {
  PeakList peaks;
  ShiftAnalysis shifts;
  std::vector<ReferenceConstants> references;
};

/// Peak detection, assignment and fits on a shifted, normalized spectrum, with the
/// analysis options of `config`. Throws NumericalError when fewer than two system
/// peaks can be assigned.
AnalysisResult analyze_spectrum(const SpectrumGrid& spec, const JobConfig& config, const ModelSpec& model);

struct JobOptions {
  // Non-empty: the first trajectory is also propagated on its own and dumped here.
  std::string debug_traj_path;
  // Progress lines on stderr.
  bool progress = true;
};

struct JobResult {
  RunResult run;
  SpectrumGrid spectrum;  // shifted and normalized, as written
  AnalysisResult analysis;
};

/// discretize, propagate, estimate, analyze. Writes the bath table, spectrum,
/// analysis report, plot script and manifest into config.out_dir. Throws
/// ConfigError, NumericalError or IoError.
JobResult run_job(const JobConfig& config, const JobOptions& options = {});

/// Config echo followed by '#' lines with versions, wall time and trajectory counts.
void write_manifest(std::ostream& os, const JobConfig& config, const RunResult& run);

}  // namespace mtasc

#endif  // MTASC_JOB_HPP
