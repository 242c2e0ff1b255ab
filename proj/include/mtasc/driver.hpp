#ifndef MTASC_DRIVER_HPP
#define MTASC_DRIVER_HPP

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "mtasc/dynamics.hpp"
#include "mtasc/scivr.hpp"
#include "mtasc/spectrum.hpp"

namespace mtasc {

struct RunOptions {
  std::size_t n_traj = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  // Trajectories per reduction block. Part of the summation order, so changing
  // it changes the last bits of the result.
  std::size_t block_size = 16;
  // Running sum is checkpointed here after every folded block when non-empty.
  std::string scratch_path;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct RunCounts {
  std::size_t n_traj = 0;
  std::size_t n_valid = 0;
  std::size_t n_non_finite = 0;
  std::size_t n_phase_unresolved = 0;
  std::size_t n_not_positive_definite = 0;

  std::size_t n_invalid() const { return n_traj - n_valid; }
  RunCounts& operator+=(const RunCounts& o);
};

struct RunResult {
  SpectrumGrid spectrum;
  RunCounts counts;
  double wall_seconds = 0.0;
};

/// Running sum of per-trajectory contributions over the first `blocks_done` blocks.
struct ScratchState {
  std::size_t blocks_done = 0;
  std::size_t block_size = 0;
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
  RunCounts counts;
  VectorXd sum;
};

/// 8-byte magic "MTASCSP1" followed by little-endian float64 values:
/// n_bins, blocks_done, block_size, n_traj, seed (low and high 32 bits),
/// the five RunCounts fields, then the n_bins sums.
void write_scratch(const std::string& path, const ScratchState& state);
/// Returns false if the file does not exist; throws on a malformed file.
bool read_scratch(const std::string& path, ScratchState& state);

/// Samples, propagates and accumulates `options.n_traj` trajectories. Blocks of
/// trajectories are summed in index order and the block sums are folded in block
/// order, so the spectrum is bit-identical for any worker count.
template <PotentialModel P>
RunResult run_estimator(const P& pot, const ReferenceState& ref, const EstimatorSettings& est_settings,
                        const PropagationSettings& prop, const RunOptions& options) {
  const auto wall_start = std::chrono::steady_clock::now();
  if (options.n_traj == 0) throw std::invalid_argument("run_estimator: n_traj must be positive");
  if (options.block_size == 0) throw std::invalid_argument("run_estimator: block_size must be positive");
  if (prop.n_steps != est_settings.n_steps || prop.dt != est_settings.dt) {
    throw std::invalid_argument("run_estimator: propagation and estimator grids differ");
  }
  // Resolves the split (TA methods sample every DOF) and validates settings.
  const EstimatorSettings settings = TrajectorySpectrum(ref, est_settings).settings();
  const MixedSplit& split = settings.split;
  const auto n_bins = static_cast<Eigen::Index>(settings.n_bins());

  auto run_one = [&](TrajectorySpectrum& est, std::size_t index, Eigen::Ref<VectorXd> acc, RunCounts& counts) {
    const PhasePoint start = sample_initial_condition(ref, split, options.seed, index);
    est.begin(start);
    const TrajectoryStatus ts = propagate(start, pot, prop, ref.widths, est);
    ++counts.n_traj;
    if (ts == TrajectoryStatus::kNonFinite) {
      ++counts.n_non_finite;
      return;
    }
    if (ts == TrajectoryStatus::kPhaseUnresolved) {
      ++counts.n_phase_unresolved;
      return;
    }
    switch (est.finish(acc)) {
      case EstimatorStatus::kOk: ++counts.n_valid; break;
      case EstimatorStatus::kNonFinite: ++counts.n_non_finite; break;
      case EstimatorStatus::kPhaseUnresolved: ++counts.n_phase_unresolved; break;
      case EstimatorStatus::kNotPositiveDefinite: ++counts.n_not_positive_definite; break;
    }
  };

  ScratchState state;
  state.block_size = options.block_size;
  state.n_traj = options.n_traj;
  state.seed = options.seed;
  state.sum = VectorXd::Zero(n_bins);

  if (split.hk_count() == 0) {
    // Nothing is sampled: every trajectory is the reference-centre trajectory.
    TrajectorySpectrum est(ref, settings);
    RunCounts one;
    run_one(est, 0, state.sum, one);
    state.counts.n_traj = options.n_traj;
    if (one.n_valid == 1) {
      state.counts.n_valid = options.n_traj;
    } else {
      state.counts.n_non_finite = one.n_non_finite ? options.n_traj : 0;
      state.counts.n_phase_unresolved = one.n_phase_unresolved ? options.n_traj : 0;
      state.counts.n_not_positive_definite = one.n_not_positive_definite ? options.n_traj : 0;
    }
  } else {
    const std::size_t n_blocks = (options.n_traj + options.block_size - 1) / options.block_size;
    if (!options.scratch_path.empty()) {
      ScratchState saved;
      if (read_scratch(options.scratch_path, saved)) {
        if (saved.block_size != state.block_size || saved.n_traj != state.n_traj || saved.seed != state.seed ||
            saved.sum.size() != n_bins) {
          throw std::invalid_argument("run_estimator: scratch file belongs to a different run");
        }
        state = saved;
      }
    }
    std::atomic<std::size_t> next_block{state.blocks_done};
    std::mutex mutex;
    std::map<std::size_t, std::pair<VectorXd, RunCounts>> pending;
    std::exception_ptr failure;
    std::atomic<bool> stop{false};

    auto worker = [&]() {
      try {
        TrajectorySpectrum est(ref, settings);
        VectorXd block(n_bins);
        while (!stop.load()) {
          const std::size_t b = next_block.fetch_add(1);
          if (b >= n_blocks) break;
          block.setZero();
          RunCounts counts;
          const std::size_t first = b * options.block_size;
          const std::size_t last = std::min(options.n_traj, first + options.block_size);
          for (std::size_t i = first; i < last; ++i) run_one(est, i, block, counts);
          std::lock_guard<std::mutex> lock(mutex);
          pending.emplace(b, std::make_pair(block, counts));
          while (!pending.empty() && pending.begin()->first == state.blocks_done) {
            state.sum += pending.begin()->second.first;
            state.counts += pending.begin()->second.second;
            pending.erase(pending.begin());
            ++state.blocks_done;
            if (!options.scratch_path.empty()) write_scratch(options.scratch_path, state);
            if (options.progress) options.progress(state.counts.n_traj, options.n_traj);
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!failure) failure = std::current_exception();
        stop.store(true);
      }
    };

    const std::size_t n_workers = std::max<std::size_t>(1, std::min(options.workers, n_blocks));
    if (n_workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
  }

  if (state.counts.n_valid == 0) {
    throw NumericalError("run_estimator: no valid trajectories (" + std::to_string(state.counts.n_non_finite) +
                         " non-finite, " + std::to_string(state.counts.n_phase_unresolved) +
                         " phase-unresolved, " + std::to_string(state.counts.n_not_positive_definite) +
                         " not positive definite)");
  }
  RunResult result;
  result.counts = state.counts;
  result.spectrum.e_min = settings.e_min;
  result.spectrum.e_step = settings.e_step();
  result.spectrum.intensity = state.sum / static_cast<double>(state.counts.n_valid);
  result.spectrum.meta.method = std::string(to_string(settings.method));
  result.spectrum.meta.n_traj = state.counts.n_traj;
  result.spectrum.meta.n_valid = state.counts.n_valid;
  result.spectrum.meta.seed = options.seed;
  result.spectrum.meta.padding = settings.padding;
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

}  // namespace mtasc

#endif  // MTASC_DRIVER_HPP
