#include "mtasc/model.hpp"

#include <cstdint>
#include <cstring>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mtasc/grid_eigensolver.hpp"

namespace mtasc {

void MorseParams::validate() const {
  if (!(dissociation_energy > 0.0)) throw std::invalid_argument("morse: D_e must be positive");
  if (!(range > 0.0)) throw std::invalid_argument("morse: alpha must be positive");
  if (!(mass > 0.0)) throw std::invalid_argument("morse: mass must be positive");
  if (!std::isfinite(equilibrium)) throw std::invalid_argument("morse: s_eq must be finite");
}

std::size_t MorseParams::bound_state_count() const {
  const double xe = x_e();
  if (xe <= 0.0) return std::numeric_limits<std::size_t>::max();
  const double limit = 1.0 / (2.0 * xe) - 0.5;
  auto n = static_cast<std::size_t>(std::ceil(limit));
  return n;
}

double morse_level(std::size_t n, const MorseParams& params) {
  const double xe = params.x_e();
  const double nh = static_cast<double>(n) + 0.5;
  if (xe > 0.0 && !(static_cast<double>(n) < 1.0 / (2.0 * xe) - 0.5)) {
    throw std::domain_error("morse_level: index beyond the bound-state range");
  }
  const double w = params.omega_e();
  return w * nh - w * xe * nh * nh;
}

void BathParams::validate() const {
  if (!(omega_c > 0.0)) throw std::invalid_argument("bath: omega_c must be positive");
  if (!(omega_max > 0.0)) throw std::invalid_argument("bath: omega_max must be positive");
  if (!(eta_eff >= 0.0)) throw std::invalid_argument("bath: eta_eff must be non-negative");
  if (!(system_mass > 0.0) || !(system_frequency > 0.0)) {
    throw std::invalid_argument("bath: system mass and frequency must be positive");
  }
}

BathParams make_bath(const MorseParams& morse, std::size_t count, double omega_c_rel,
                     double omega_max_rel, double eta_eff, bool counter_term) {
  BathParams b;
  const double ws = morse.omega_e();
  b.count = count;
  b.omega_c = omega_c_rel * ws;
  b.omega_max = omega_max_rel * ws;
  b.eta_eff = eta_eff;
  b.counter_term = counter_term;
  b.system_mass = morse.mass;
  b.system_frequency = ws;
  return b;
}

double BathDiscretization::cumulative_density(double w, const BathParams& bath) const {
  // a eta w_c (1 - exp(-w / w_c)); a eta is finite even for eta -> 0.
  const double fb = static_cast<double>(bath.count);
  return fb * -std::expm1(-w / bath.omega_c) / -std::expm1(-bath.omega_max / bath.omega_c);
}

BathDiscretization discretize_bath(const BathParams& bath) {
  bath.validate();
  BathDiscretization d;
  const std::size_t n = bath.count;
  d.omega.resize(static_cast<Eigen::Index>(n));
  d.coupling.resize(static_cast<Eigen::Index>(n));
  if (n == 0) {
    d.normalization = std::numeric_limits<double>::infinity();
    return d;
  }
  const double fb = static_cast<double>(n);
  const double tail = -std::expm1(-bath.omega_max / bath.omega_c);  // 1 - exp(-w_max / w_c)
  const double eta = bath.eta();
  d.normalization = eta > 0.0 ? fb / (eta * bath.omega_c * tail)
                              : std::numeric_limits<double>::infinity();
  const double inv_a = eta * bath.omega_c * tail / fb;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto k = static_cast<Eigen::Index>(i - 1);
    const double w = -bath.omega_c * std::log1p(-static_cast<double>(i) * tail / fb);
    d.omega(k) = w;
    // c_i^2 = (2/pi) w_i J(w_i) / rho(w_i) = (2/pi) w_i^2 / a
    d.coupling(k) = w * std::sqrt(2.0 / kPi * inv_a);
  }
  return d;
}

ModelSpec::ModelSpec(const MorseParams& morse, const BathParams& bath)
    : morse_(morse), bath_(bath) {
  morse_.validate();
  disc_ = discretize_bath(bath_);
  masses_ = VectorXd::Ones(dof());
  masses_(0) = morse_.mass;
  omega_sq_ = disc_.omega.array().square();
  system_ct_ = counter_term_coefficient();
}

double ModelSpec::counter_term_coefficient(CounterTermForm form) const {
  if (disc_.size() == 0) return 0.0;
  if (form == CounterTermForm::kPrinted) {
    if (!std::isfinite(disc_.normalization)) return 0.0;
    return kPi / 4.0 * static_cast<double>(disc_.size()) / disc_.normalization;
  }
  return 0.5 * (disc_.coupling.array().square() / disc_.omega.array().square()).sum();
}

double ModelSpec::counter_term_coefficient() const {
  return bath_.counter_term ? counter_term_coefficient(CounterTermForm::kHamiltonian) : 0.0;
}

double ModelSpec::value(const VectorXd& q) const {
  const double ds = q(0) - morse_.equilibrium;
  double v = morse_potential(q(0), morse_).value + system_ct_ * ds * ds;
  const auto y = q.tail(dof() - 1).array();
  v += 0.5 * (omega_sq_.array() * y.square()).sum() + ds * (disc_.coupling.array() * y).sum();
  return v;
}

void ModelSpec::gradient(const VectorXd& q, VectorXd& grad) const {
  const double ds = q(0) - morse_.equilibrium;
  const Eigen::Index nb = dof() - 1;
  grad.resize(dof());
  const auto y = q.tail(nb);
  grad(0) = morse_potential(q(0), morse_).slope + 2.0 * system_ct_ * ds + disc_.coupling.dot(y);
  grad.tail(nb) = omega_sq_.cwiseProduct(y) + ds * disc_.coupling;
}

void ModelSpec::hessian_apply(const VectorXd& q, Eigen::Ref<const RowMatrixXd> x,
                              Eigen::Ref<RowMatrixXd> out) const {
  const Eigen::Index nb = dof() - 1;
  const double hss = morse_potential(q(0), morse_).curvature + 2.0 * system_ct_;
  out.row(0).noalias() = hss * x.row(0) + disc_.coupling.transpose() * x.bottomRows(nb);
  out.bottomRows(nb).noalias() = omega_sq_.asDiagonal() * x.bottomRows(nb);
  out.bottomRows(nb).noalias() += disc_.coupling * x.row(0);
}

MatrixXd ModelSpec::hessian(const VectorXd& q) const { return potential_full(q, *this).hessian; }

std::string ModelSpec::hash() const {
  // FNV-1a over the parameter bytes.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  const double fields[] = {morse_.dissociation_energy, morse_.range,    morse_.equilibrium,
                           morse_.mass,                bath_.omega_c,   bath_.omega_max,
                           bath_.eta_eff,              bath_.system_mass, bath_.system_frequency};
  mix(fields, sizeof(fields));
  const std::uint64_t count = bath_.count;
  mix(&count, sizeof(count));
  const unsigned char ct = bath_.counter_term ? 1 : 0;
  mix(&ct, 1);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

QuadraticPotential::QuadraticPotential(VectorXd masses, MatrixXd stiffness, VectorXd center)
    : masses_(std::move(masses)), stiffness_(std::move(stiffness)), center_(std::move(center)) {
  if (stiffness_.rows() != masses_.size() || stiffness_.cols() != masses_.size() ||
      center_.size() != masses_.size()) {
    throw std::invalid_argument("QuadraticPotential: inconsistent dimensions");
  }
  if ((masses_.array() <= 0.0).any()) throw std::invalid_argument("QuadraticPotential: masses must be positive");
}

QuadraticPotential QuadraticPotential::uncoupled(const VectorXd& masses, const VectorXd& omega) {
  VectorXd k = masses.array() * omega.array().square();
  return {masses, k.asDiagonal().toDenseMatrix(), VectorXd::Zero(masses.size())};
}

double QuadraticPotential::value(const VectorXd& q) const {
  const VectorXd d = q - center_;
  return 0.5 * d.dot(stiffness_ * d);
}

void QuadraticPotential::gradient(const VectorXd& q, VectorXd& grad) const {
  grad.noalias() = stiffness_ * (q - center_);
}

void QuadraticPotential::hessian_apply(const VectorXd&, Eigen::Ref<const RowMatrixXd> x,
                                       Eigen::Ref<RowMatrixXd> out) const {
  out.noalias() = stiffness_ * x;
}

std::vector<double> modified_morse_levels(const ModelSpec& spec, std::size_t n_levels,
                                          CounterTermForm form) {
  if (!spec.bath().counter_term) {
    throw std::invalid_argument("modified_morse_levels: counter term is off");
  }
  if (n_levels == 0) throw std::invalid_argument("modified_morse_levels: need at least one level");
  return grid_morse_levels(spec.morse(), n_levels, spec.counter_term_coefficient(form));
}

std::vector<double> grid_morse_levels(const MorseParams& m, std::size_t n_levels, double extra) {
  if (n_levels == 0) throw std::invalid_argument("grid_morse_levels: need at least one level");
  auto v = [m, extra](double s) {
    const double ds = s - m.equilibrium;
    return morse_potential(s, m).value + extra * ds * ds;
  };
  const Interval domain{m.equilibrium - 3.0 / m.range, m.equilibrium + 8.0 / m.range};
  return grid_eigensolve(v, m.mass, domain, n_levels);
}

void write_bath_csv(std::ostream& os, const BathDiscretization& disc) {
  os << "i,omega_au,c_au\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < disc.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    os << (i + 1) << ',' << disc.omega(k) << ',' << disc.coupling(k) << '\n';
  }
}

}  // namespace mtasc
