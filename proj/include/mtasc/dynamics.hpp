#ifndef MTASC_DYNAMICS_HPP
#define MTASC_DYNAMICS_HPP

#include <cmath>
#include <concepts>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "mtasc/model.hpp"
#include "mtasc/split.hpp"
#include "mtasc/types.hpp"

namespace mtasc {

/// Anything the propagator can integrate: a potential with diagonal masses,
/// an analytic gradient and a Hessian-times-block product.
template <class P>
concept PotentialModel = requires(const P& pot, const VectorXd& q, VectorXd& g,
                                  Eigen::Ref<const RowMatrixXd> x, Eigen::Ref<RowMatrixXd> out) {
  { pot.dof() } -> std::convertible_to<Eigen::Index>;
  { pot.masses() } -> std::convertible_to<const VectorXd&>;
  { pot.value(q) } -> std::convertible_to<double>;
  pot.gradient(q, g);
  pot.hessian_apply(q, x, out);
};

struct PhasePoint {
  VectorXd p;
  VectorXd q;

  Eigen::Index dof() const { return q.size(); }
  bool all_finite() const { return p.allFinite() && q.allFinite(); }
};

/// Diagonal coherent-state width matrix gamma (inverse length squared).
struct WidthMatrix {
  VectorXd gamma;

  Eigen::Index dof() const { return gamma.size(); }
  void validate() const;
};

/// gamma_s = m_s omega_e for the system, gamma_i = omega_i for the unit-mass bath modes.
WidthMatrix canonical_widths(const ModelSpec& spec);
/// gamma_j = m_j omega_j / hbar.
WidthMatrix harmonic_widths(const VectorXd& masses, const VectorXd& omega);

/// Stability matrix d(p(t), q(t)) / d(p(0), q(0)), stored as the p rows and q rows.
class MonodromyMatrix {
 public:
  MonodromyMatrix() = default;
  explicit MonodromyMatrix(Eigen::Index dof);
  /// From a 2F x 2F matrix ordered (p, q) in both rows and columns.
  static MonodromyMatrix from_full(const MatrixXd& full);

  Eigen::Index dof() const { return p_rows_.rows(); }
  RowMatrixXd& p_rows() { return p_rows_; }
  RowMatrixXd& q_rows() { return q_rows_; }
  const RowMatrixXd& p_rows() const { return p_rows_; }
  const RowMatrixXd& q_rows() const { return q_rows_; }

  auto pp() const { return p_rows_.leftCols(dof()); }
  auto pq() const { return p_rows_.rightCols(dof()); }
  auto qp() const { return q_rows_.leftCols(dof()); }
  auto qq() const { return q_rows_.rightCols(dof()); }

  MatrixXd full() const;
  /// max |(M^T J M - J)_ab|.
  double symplectic_defect() const;
  /// Inverse of a symplectic matrix, -J M^T J.
  MonodromyMatrix symplectic_inverse() const;
  MonodromyMatrix operator*(const MonodromyMatrix& rhs) const;
  bool all_finite() const { return p_rows_.allFinite() && q_rows_.allFinite(); }

 private:
  RowMatrixXd p_rows_;
  RowMatrixXd q_rows_;
};

/// C_t^2 in log-polar form; arg is the principal value in (-pi, pi].
struct PrefactorSquared {
  double log_modulus = 0.0;
  double arg = 0.0;

  Complex value() const { return std::polar(std::exp(log_modulus), arg); }
};

/// Evaluates C_t^2 = det[(M_qq + M_pp - i hbar gamma M_qp + i/hbar gamma^-1 M_pq) / 2]
/// with gamma applied symmetrically (gamma^1/2 left and right), reusing its workspace.
class HkPrefactor {
 public:
  explicit HkPrefactor(const WidthMatrix& widths);
  PrefactorSquared operator()(const MonodromyMatrix& m);

 private:
  VectorXd sqrt_gamma_;
  MatrixXcd kernel_;
  Eigen::PartialPivLU<MatrixXcd> lu_;
};

inline PrefactorSquared hk_prefactor_squared(const MonodromyMatrix& m, const WidthMatrix& widths) {
  HkPrefactor eval(widths);
  return eval(m);
}

/// Continuous branch of phi = arg(C_t^2) / 2.
///
/// arg(C^2) + rate * t is unwrapped, where `rate` is the expected mean rotation
/// (sum of omega_j for matched harmonic widths). The wrapped increment of that
/// residual must stay below `max_step` between updates; otherwise the series
/// is marked unresolved.
class PhaseTracker {
 public:
  explicit PhaseTracker(double rate = 0.0, double max_step = 0.5 * kPi)
      : rate_(rate), max_step_(max_step) {}

  /// Wrapped residual increment that update(c2, t) would apply.
  double increment(const PrefactorSquared& c2, double t) const;
  bool accepts(const PrefactorSquared& c2, double t) const {
    return !started_ || std::abs(increment(c2, t)) < max_step_;
  }
  double update(const PrefactorSquared& c2, double t);
  double update(const PrefactorSquared& c2) { return update(c2, 0.0); }

  double phase() const { return 0.5 * (residual_ - rate_ * time_); }
  bool resolved() const { return resolved_; }
  double largest_step() const { return largest_step_; }

 private:
  double rate_;
  double max_step_;
  bool started_ = false;
  bool resolved_ = true;
  double last_residual_ = 0.0;
  double residual_ = 0.0;
  double time_ = 0.0;
  double largest_step_ = 0.0;
};

/// Sum of gamma_j hbar / m_j, the C^2 rotation rate of matched harmonic modes.
double reference_phase_rate(const WidthMatrix& widths, const VectorXd& masses);

struct PropagationSettings {
  std::size_t n_steps = 16384;
  double dt = 1.0;
  // Integrator substeps per saved step.
  std::size_t substeps = 16;
  // 2: position Verlet; 4: triple-jump composition of it.
  int order = 4;

  double total_time() const { return static_cast<double>(n_steps) * dt; }
  void validate() const;
};

enum class TrajectoryStatus { kValid, kNonFinite, kPhaseUnresolved };

const char* to_string(TrajectoryStatus s);

/// State handed to streaming observers after every saved step (including step 0).
struct TrajectoryStep {
  std::size_t index;
  double time;
  const PhasePoint& point;
  double action;
  const MonodromyMatrix& monodromy;
  double phase;
  double prefactor_log_modulus;
  double energy;
};

/// Full time series of one trajectory; index k runs over 0..n_steps.
struct TrajectoryRecord {
  double dt = 0.0;
  std::size_t substeps = 0;
  MatrixXd p;  // (n_steps + 1) x F
  MatrixXd q;
  VectorXd action;
  VectorXd phase;
  VectorXd prefactor_log_modulus;
  VectorXd energy;
  std::vector<MonodromyMatrix> monodromy;
  TrajectoryStatus status = TrajectoryStatus::kValid;

  bool valid() const { return status == TrajectoryStatus::kValid; }
  std::size_t size() const { return static_cast<std::size_t>(action.size()); }
  PhasePoint point(std::size_t k) const;
  /// max_k |E_k - E_0| / |E_0|.
  double max_relative_energy_error() const;
};

/// Position Verlet for (p, q), the action and the tangent map, all on the same
/// discretisation. The tangent map is the exact derivative of the discrete flow,
/// so it is symplectic to round-off.
template <PotentialModel P>
class Propagator {
 public:
  /// `order` is 2 (position Verlet) or 4 (Verlet composed as a triple jump).
  Propagator(const P& pot, const PhasePoint& start, double dt, std::size_t substeps, int order = 2)
      : pot_(&pot),
        order_(order),
        x_(start),
        m_(pot.dof()),
        inv_mass_(pot.masses().cwiseInverse()),
        grad_(pot.dof()),
        hm_(pot.dof(), 2 * pot.dof()),
        h_(dt / static_cast<double>(substeps)),
        substeps_(substeps),
        dt_(dt) {}

  /// One saved step.
  void advance() {
    while (sub_ < substeps_) substep();
    ++step_;
    sub_ = 0;
  }

  /// One integrator substep; `substeps` of these make a saved step.
  void substep() {
    if (order_ == 4) {
      verlet(kYoshidaOuter * h_);
      verlet(kYoshidaInner * h_);
      verlet(kYoshidaOuter * h_);
    } else {
      verlet(h_);
    }
    ++sub_;
  }

  const PhasePoint& point() const { return x_; }
  const MonodromyMatrix& monodromy() const { return m_; }
  double action() const { return action_; }
  double time() const {
    return (static_cast<double>(step_) + static_cast<double>(sub_) / static_cast<double>(substeps_)) * dt_;
  }
  std::size_t substeps() const { return substeps_; }
  double kinetic() const { return 0.5 * (x_.p.array().square() * inv_mass_.array()).sum(); }
  double energy() const { return kinetic() + pot_->value(x_.q); }
  bool all_finite() const { return x_.all_finite() && std::isfinite(action_) && m_.all_finite(); }

 private:
  // Triple-jump weights; they sum to one.
  static constexpr double kYoshidaOuter = 1.3512071919596578;
  static constexpr double kYoshidaInner = -1.7024143839193155;

  void verlet(double h) {
    const double half = 0.5 * h;
    x_.q.noalias() += half * inv_mass_.cwiseProduct(x_.p);
    m_.q_rows().noalias() += half * inv_mass_.asDiagonal() * m_.p_rows();

    const double t_before = kinetic();
    const double v = pot_->value(x_.q);
    pot_->gradient(x_.q, grad_);
    pot_->hessian_apply(x_.q, m_.q_rows(), hm_);
    x_.p.noalias() -= h * grad_;
    m_.p_rows().noalias() -= h * hm_;
    action_ += half * (t_before + kinetic()) - h * v;

    x_.q.noalias() += half * inv_mass_.cwiseProduct(x_.p);
    m_.q_rows().noalias() += half * inv_mass_.asDiagonal() * m_.p_rows();
  }

  const P* pot_;
  int order_;
  PhasePoint x_;
  MonodromyMatrix m_;
  VectorXd inv_mass_;
  VectorXd grad_;
  RowMatrixXd hm_;
  double h_;
  std::size_t substeps_;
  double dt_;
  double action_ = 0.0;
  std::size_t step_ = 0;
  std::size_t sub_ = 0;
};

/// Streams every saved step to `observer`. The prefactor phase is checked once
/// per saved step; a step whose phase increment is too large is repeated with
/// a check after every substep. Stops at the first non-finite state or
/// unresolvable phase and reports why.
template <PotentialModel P, class Observer>
TrajectoryStatus propagate(const PhasePoint& start, const P& pot, const PropagationSettings& settings,
                           const WidthMatrix& widths, Observer&& observer) {
  settings.validate();
  if (widths.dof() != pot.dof()) throw std::invalid_argument("propagate: width dimension mismatch");
  Propagator<P> prop(pot, start, settings.dt, settings.substeps, settings.order);
  HkPrefactor prefactor(widths);
  PhaseTracker tracker(reference_phase_rate(widths, pot.masses()));
  // Prefactor of the current step when the acceptance check already computed it.
  std::optional<PrefactorSquared> cached;
  for (std::size_t k = 0;; ++k) {
    if (!prop.all_finite()) return TrajectoryStatus::kNonFinite;
    const PrefactorSquared c2 = cached ? *cached : prefactor(prop.monodromy());
    cached.reset();
    if (!std::isfinite(c2.log_modulus) || !std::isfinite(c2.arg)) return TrajectoryStatus::kNonFinite;
    const double phase = tracker.update(c2, prop.time());
    if (!tracker.resolved()) return TrajectoryStatus::kPhaseUnresolved;
    const double energy = prop.energy();
    if (!std::isfinite(energy)) return TrajectoryStatus::kNonFinite;
    observer(TrajectoryStep{k, prop.time(), prop.point(), prop.action(), prop.monodromy(), phase,
                            0.5 * c2.log_modulus, energy});
    if (k == settings.n_steps) break;

    Propagator<P> saved = prop;
    prop.advance();
    if (!prop.all_finite()) return TrajectoryStatus::kNonFinite;
    const PrefactorSquared next = prefactor(prop.monodromy());
    if (tracker.accepts(next, prop.time())) {
      cached = next;
    } else {
      prop = std::move(saved);
      for (std::size_t s = 1; s < prop.substeps(); ++s) {
        prop.substep();
        if (!prop.all_finite()) return TrajectoryStatus::kNonFinite;
        tracker.update(prefactor(prop.monodromy()), prop.time());
        if (!tracker.resolved()) return TrajectoryStatus::kPhaseUnresolved;
      }
      prop.advance();
    }
  }
  return TrajectoryStatus::kValid;
}

/// Propagates and stores the whole series. Invalid records keep the steps
/// computed before the failure.
template <PotentialModel P>
TrajectoryRecord propagate(const PhasePoint& start, const P& pot, const PropagationSettings& settings,
                           const WidthMatrix& widths, bool keep_monodromy = true) {
  TrajectoryRecord rec;
  const auto n = static_cast<Eigen::Index>(settings.n_steps + 1);
  const Eigen::Index f = pot.dof();
  rec.dt = settings.dt;
  rec.substeps = settings.substeps;
  rec.p.resize(n, f);
  rec.q.resize(n, f);
  rec.action.resize(n);
  rec.phase.resize(n);
  rec.prefactor_log_modulus.resize(n);
  rec.energy.resize(n);
  if (keep_monodromy) rec.monodromy.reserve(static_cast<std::size_t>(n));
  Eigen::Index filled = 0;
  rec.status = propagate(start, pot, settings, widths, [&](const TrajectoryStep& s) {
    const auto k = static_cast<Eigen::Index>(s.index);
    rec.p.row(k) = s.point.p.transpose();
    rec.q.row(k) = s.point.q.transpose();
    rec.action(k) = s.action;
    rec.phase(k) = s.phase;
    rec.prefactor_log_modulus(k) = s.prefactor_log_modulus;
    rec.energy(k) = s.energy;
    if (keep_monodromy) rec.monodromy.push_back(s.monodromy);
    filled = k + 1;
  });
  if (filled < n) {
    rec.p.conservativeResize(filled, f);
    rec.q.conservativeResize(filled, f);
    rec.action.conservativeResize(filled);
    rec.phase.conservativeResize(filled);
    rec.prefactor_log_modulus.conservativeResize(filled);
    rec.energy.conservativeResize(filled);
  }
  return rec;
}

/// Recomputes the unwrapped prefactor phase from the stored monodromy series.
/// Throws NumericalError when consecutive steps are too far apart to unwrap.
VectorXd hk_phase(const TrajectoryRecord& record, const WidthMatrix& widths);

struct MonodromySubmatrices {
  MatrixXd m11;  // dp(t)/dp_tg(0)
  MatrixXd m12;  // dp(t)/dq_tg(0)
  MatrixXd m21;  // dq(t)/dp_tg(0)
  MatrixXd m22;  // dq(t)/dq_tg(0)
};

/// Full-row, TG-column slices of the monodromy matrix.
MonodromySubmatrices monodromy_submatrices(const MonodromyMatrix& m, const MixedSplit& split);

/// Diagnostic dump: step,t,E,S,phi,abs_C.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);

}  // namespace mtasc

#endif  // MTASC_DYNAMICS_HPP
