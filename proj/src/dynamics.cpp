#include "mtasc/dynamics.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mtasc {

void WidthMatrix::validate() const {
  if (gamma.size() == 0 || !(gamma.array() > 0.0).all() || !gamma.allFinite()) {
    throw std::invalid_argument("WidthMatrix: widths must be positive and finite");
  }
}

WidthMatrix canonical_widths(const ModelSpec& spec) {
  WidthMatrix w;
  w.gamma.resize(spec.dof());
  w.gamma(0) = spec.morse().mass * spec.morse().omega_e() / kHbar;
  w.gamma.tail(spec.dof() - 1) = spec.discretization().omega / kHbar;
  return w;
}

WidthMatrix harmonic_widths(const VectorXd& masses, const VectorXd& omega) {
  return WidthMatrix{masses.cwiseProduct(omega) / kHbar};
}

MonodromyMatrix::MonodromyMatrix(Eigen::Index dof)
    : p_rows_(RowMatrixXd::Zero(dof, 2 * dof)), q_rows_(RowMatrixXd::Zero(dof, 2 * dof)) {
  p_rows_.leftCols(dof).setIdentity();
  q_rows_.rightCols(dof).setIdentity();
}

MonodromyMatrix MonodromyMatrix::from_full(const MatrixXd& full) {
  const Eigen::Index f = full.rows() / 2;
  if (full.rows() != 2 * f || full.cols() != 2 * f) {
    throw std::invalid_argument("MonodromyMatrix: expected a 2F x 2F matrix");
  }
  MonodromyMatrix m;
  m.p_rows_ = full.topRows(f);
  m.q_rows_ = full.bottomRows(f);
  return m;
}

MatrixXd MonodromyMatrix::full() const {
  const Eigen::Index f = dof();
  MatrixXd out(2 * f, 2 * f);
  out.topRows(f) = p_rows_;
  out.bottomRows(f) = q_rows_;
  return out;
}

namespace {

// Symplectic form for (p, q) ordering: dp/dt = -dH/dq, dq/dt = dH/dp.
MatrixXd symplectic_form(Eigen::Index f) {
  MatrixXd j = MatrixXd::Zero(2 * f, 2 * f);
  j.topRightCorner(f, f) = -MatrixXd::Identity(f, f);
  j.bottomLeftCorner(f, f) = MatrixXd::Identity(f, f);
  return j;
}

}  // namespace

double MonodromyMatrix::symplectic_defect() const {
  const MatrixXd m = full();
  const MatrixXd j = symplectic_form(dof());
  return (m.transpose() * j * m - j).cwiseAbs().maxCoeff();
}

MonodromyMatrix MonodromyMatrix::symplectic_inverse() const {
  const Eigen::Index f = dof();
  MonodromyMatrix inv;
  inv.p_rows_.resize(f, 2 * f);
  inv.q_rows_.resize(f, 2 * f);
  inv.p_rows_.leftCols(f) = qq().transpose();
  inv.p_rows_.rightCols(f) = -pq().transpose();
  inv.q_rows_.leftCols(f) = -qp().transpose();
  inv.q_rows_.rightCols(f) = pp().transpose();
  return inv;
}

MonodromyMatrix MonodromyMatrix::operator*(const MonodromyMatrix& rhs) const {
  const Eigen::Index f = dof();
  MonodromyMatrix out;
  out.p_rows_.resize(f, 2 * f);
  out.q_rows_.resize(f, 2 * f);
  out.p_rows_.noalias() = pp() * rhs.p_rows_ + pq() * rhs.q_rows_;
  out.q_rows_.noalias() = qp() * rhs.p_rows_ + qq() * rhs.q_rows_;
  return out;
}

HkPrefactor::HkPrefactor(const WidthMatrix& widths)
    : sqrt_gamma_(widths.gamma.cwiseSqrt()),
      kernel_(widths.dof(), widths.dof()),
      lu_(widths.dof()) {
  widths.validate();
}

PrefactorSquared HkPrefactor::operator()(const MonodromyMatrix& m) {
  const Eigen::Index f = sqrt_gamma_.size();
  if (m.dof() != f) throw std::invalid_argument("HkPrefactor: dimension mismatch");
  for (Eigen::Index b = 0; b < f; ++b) {
    for (Eigen::Index a = 0; a < f; ++a) {
      const double ga = sqrt_gamma_(a);
      const double gb = sqrt_gamma_(b);
      const double re = m.qq()(a, b) * ga / gb + m.pp()(a, b) * gb / ga;
      const double im = -kHbar * m.qp()(a, b) * ga * gb + m.pq()(a, b) / (kHbar * ga * gb);
      kernel_(a, b) = 0.5 * Complex(re, im);
    }
  }
  lu_.compute(kernel_);
  PrefactorSquared out;
  double arg = lu_.permutationP().determinant() < 0 ? kPi : 0.0;
  const auto& lu = lu_.matrixLU();
  for (Eigen::Index k = 0; k < f; ++k) {
    out.log_modulus += std::log(std::abs(lu(k, k)));
    arg += std::arg(lu(k, k));
  }
  out.arg = std::remainder(arg, 2.0 * kPi);
  return out;
}

double PhaseTracker::increment(const PrefactorSquared& c2, double t) const {
  return std::remainder(c2.arg + rate_ * t - last_residual_, 2.0 * kPi);
}

double PhaseTracker::update(const PrefactorSquared& c2, double t) {
  if (!started_) {
    started_ = true;
    residual_ = c2.arg + rate_ * t;
  } else {
    const double step = increment(c2, t);
    largest_step_ = std::max(largest_step_, std::abs(step));
    if (std::abs(step) >= max_step_) resolved_ = false;
    residual_ += step;
  }
  last_residual_ = std::remainder(residual_, 2.0 * kPi);
  time_ = t;
  return phase();
}

double reference_phase_rate(const WidthMatrix& widths, const VectorXd& masses) {
  return kHbar * (widths.gamma.array() / masses.array()).sum();
}

void PropagationSettings::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("propagate: dt must be positive");
  if (substeps == 0) throw std::invalid_argument("propagate: substeps must be at least 1");
  if (order != 2 && order != 4) throw std::invalid_argument("propagate: order must be 2 or 4");
}

const char* to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::kValid: return "valid";
    case TrajectoryStatus::kNonFinite: return "non-finite";
    case TrajectoryStatus::kPhaseUnresolved: return "phase-unresolved";
  }
  return "unknown";
}

PhasePoint TrajectoryRecord::point(std::size_t k) const {
  const auto i = static_cast<Eigen::Index>(k);
  return {p.row(i).transpose(), q.row(i).transpose()};
}

double TrajectoryRecord::max_relative_energy_error() const {
  if (energy.size() == 0) return 0.0;
  return (energy.array() - energy(0)).abs().maxCoeff() / std::abs(energy(0));
}

VectorXd hk_phase(const TrajectoryRecord& record, const WidthMatrix& widths) {
  if (record.monodromy.empty()) throw std::invalid_argument("hk_phase: record has no monodromy series");
  HkPrefactor prefactor(widths);
  PhaseTracker tracker;
  // Stored series carry no masses; unwrap the raw argument.
  VectorXd out(static_cast<Eigen::Index>(record.monodromy.size()));
  for (std::size_t k = 0; k < record.monodromy.size(); ++k) {
    out(static_cast<Eigen::Index>(k)) = tracker.update(prefactor(record.monodromy[k]));
    if (!tracker.resolved()) {
      throw NumericalError("hk_phase: prefactor phase jumps too far between steps " +
                           std::to_string(k - 1) + " and " + std::to_string(k) +
                           "; reduce the time step");
    }
  }
  return out;
}

MonodromySubmatrices monodromy_submatrices(const MonodromyMatrix& m, const MixedSplit& split) {
  const Eigen::Index f = m.dof();
  split.validate(f);
  if (split.tg_count() < 1) throw std::invalid_argument("monodromy_submatrices: no TG degrees of freedom");
  const Eigen::Index ntg = split.tg_count();
  MonodromySubmatrices out{MatrixXd(f, ntg), MatrixXd(f, ntg), MatrixXd(f, ntg), MatrixXd(f, ntg)};
  for (Eigen::Index c = 0; c < ntg; ++c) {
    const Eigen::Index j = split.tg[static_cast<std::size_t>(c)];
    out.m11.col(c) = m.pp().col(j);
    out.m12.col(c) = m.pq().col(j);
    out.m21.col(c) = m.qp().col(j);
    out.m22.col(c) = m.qq().col(j);
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
  os << "step,t,E,S,phi,abs_C\n" << std::setprecision(17);
  for (std::size_t k = 0; k < record.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    os << k << ',' << record.dt * static_cast<double>(k) << ',' << record.energy(i) << ','
       << record.action(i) << ',' << record.phase(i) << ','
       << std::exp(record.prefactor_log_modulus(i)) << '\n';
  }
}

}  // namespace mtasc
