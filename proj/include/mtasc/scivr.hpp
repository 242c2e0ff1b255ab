#ifndef MTASC_SCIVR_HPP
#define MTASC_SCIVR_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "mtasc/dynamics.hpp"
#include "mtasc/model.hpp"
#include "mtasc/spectrum.hpp"
#include "mtasc/split.hpp"
#include "mtasc/types.hpp"

namespace mtasc {

/// Gaussian reference state |p_eq, q_eq> with the coherent-state widths.
struct ReferenceState {
  VectorXd p_eq;
  VectorXd q_eq;
  WidthMatrix widths;

  Eigen::Index dof() const { return q_eq.size(); }
  PhasePoint center() const { return {p_eq, q_eq}; }
  void validate() const;
};

/// System at s_eq with momentum sqrt(m_s omega_s), bath modes at rest at zero.
ReferenceState default_reference_state(const ModelSpec& spec);

/// <p_a, q_a | p_b, q_b> for a shared diagonal width matrix.
Complex coherent_overlap(const PhasePoint& a, const PhasePoint& b, const WidthMatrix& widths);

/// Husimi density |<p, q | chi>|^2 restricted to the listed DOFs (1 at the centre).
double husimi_weight(const PhasePoint& z, const ReferenceState& ref, const std::vector<Eigen::Index>& dofs);

/// Sample `index` of the stream `seed`: HK DOFs drawn from the Husimi density of the
/// reference state (sigma_q = 1/sqrt(gamma), sigma_p = hbar sqrt(gamma)), TG DOFs at the
/// reference centre. Independent of how many samples are drawn.
PhasePoint sample_initial_condition(const ReferenceState& ref, const MixedSplit& split,
                                    std::uint64_t seed, std::uint64_t index);
std::vector<PhasePoint> sample_initial_conditions(const ReferenceState& ref, const MixedSplit& split,
                                                  std::size_t n, std::uint64_t seed);

/// Gaussian-integral data of the thawed-Gaussian DOFs at one time. Columns and rows
/// are ordered (p_tg, q_tg).
struct TgAuxiliary {
  MatrixXd a;
  VectorXcd b;
  bool positive_definite = true;

  Eigen::Index size() const { return a.rows(); }
};

/// A = (1/4) X^T X with X = [gamma^1/2 (m21 m22); hbar^-1 gamma^-1/2 (m11 m12)], and
/// b = -(1/2)(m21 m22)^T gamma dq - (1/2 hbar^2)(m11 m12)^T gamma^-1 dp
///     + (i/2hbar)[(m21 m22)^T dp - (m11 m12)^T dq],
/// with (dp, dq) the displacement of the trajectory from the reference centre.
TgAuxiliary tg_auxiliary(const MonodromyMatrix& m, const PhasePoint& z, const ReferenceState& ref,
                         const MixedSplit& split);
TgAuxiliary tg_auxiliary(const TrajectoryRecord& record, const MixedSplit& split, const ReferenceState& ref,
                         std::size_t step);

enum class Method { kTaSeparable, kTaFull, kMixedSeparable, kMixedFull };

std::string_view to_string(Method m);
/// Accepts ta-sep, ta-full, mixed-sep, mixed-full.
Method parse_method(std::string_view name);

struct EstimatorSettings {
  Method method = Method::kMixedSeparable;
  MixedSplit split;
  std::size_t n_steps = 16384;
  double dt = 1.0;
  // Lowest energy of the transform; the grid is e_min + k e_step.
  double e_min = 0.0;
  std::size_t padding = 1;
  // Decimation of the outer time of the double-time estimators.
  std::size_t t1_stride = 4;

  std::size_t n_bins() const { return n_steps * padding; }
  double e_step() const { return energy_step(n_steps, dt, padding); }
  double total_time() const { return static_cast<double>(n_steps) * dt; }
  void validate(Eigen::Index dof) const;
};

enum class EstimatorStatus { kOk, kNotPositiveDefinite, kPhaseUnresolved, kNonFinite };

const char* to_string(EstimatorStatus s);

/// Per-trajectory spectral contribution. Feed every saved step of one trajectory
/// through operator(), then finish() adds the contribution (already divided by the
/// sampling weight) to an accumulator. The spectrum is the plain mean of these.
/// Reusable across trajectories; not thread-safe.
class TrajectorySpectrum {
 public:
  TrajectorySpectrum(const ReferenceState& ref, const EstimatorSettings& settings);

  void begin(const PhasePoint& start);
  void operator()(const TrajectoryStep& step);
  EstimatorStatus finish(Eigen::Ref<VectorXd> accumulator);

  const EstimatorSettings& settings() const { return settings_; }

 private:
  Complex reference_amplitude(const TrajectoryStep& step) const;
  void finish_separable(Eigen::Ref<VectorXd> acc);
  void finish_ta_full(Eigen::Ref<VectorXd> acc);
  void finish_ta_full_1d(const VectorXcd& turn, const VectorXcd& half);
  void finish_mixed_full(Eigen::Ref<VectorXd> acc);
  void add_lag_series(Eigen::Ref<VectorXd> acc, double scale);
  double time_weight(std::size_t k) const;

  ReferenceState ref_;
  EstimatorSettings settings_;
  std::size_t n_;
  std::size_t length_;
  double rate_ = 0.0;
  double weight_ = 1.0;
  double norm_ = 1.0;
  EstimatorStatus status_ = EstimatorStatus::kOk;
  std::size_t seen_ = 0;

  VectorXcd series_;
  VectorXcd lag_;
  std::vector<Complex> fft_in_;
  std::vector<Complex> fft_out_;
  Eigen::FFT<double> fft_;

  // Double-time storage.
  std::vector<MonodromyMatrix> monodromy_;
  std::vector<MatrixXd> a_;
  std::vector<VectorXcd> b_;

  Eigen::LLT<MatrixXd> llt_;
};

/// Mean spectrum of stored trajectories. Records must carry their monodromy
/// series; invalid records are skipped.
SpectrumGrid estimate_spectrum(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                               const EstimatorSettings& settings);

SpectrumGrid ta_separable(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                          EstimatorSettings settings);
SpectrumGrid ta_full(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                     EstimatorSettings settings);
SpectrumGrid mixed_separable(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                             EstimatorSettings settings);
SpectrumGrid mixed_full(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                        EstimatorSettings settings);

}  // namespace mtasc

#endif  // MTASC_SCIVR_HPP
