#ifndef MTASC_MODEL_HPP
#define MTASC_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mtasc/types.hpp"

namespace mtasc {

/// Morse oscillator V(s) = D_e (1 - exp(-alpha (s - s_eq)))^2.
/// Defaults are the molecular-iodine parameters.
struct MorseParams {
  double dissociation_energy = 0.057;  // D_e, hartree
  double range = 0.983;                // alpha, 1/bohr
  double equilibrium = 5.001;          // s_eq, bohr
  double mass = 1.165e5;               // m_s, electron masses

  /// Harmonic frequency of the well, alpha / sqrt(m / (2 D_e)).
  double omega_e() const { return range / std::sqrt(mass / (2.0 * dissociation_energy)); }
  /// Dimensionless anharmonicity x_e = omega_e / (4 D_e).
  double x_e() const { return omega_e() / (4.0 * dissociation_energy); }
  double omega_e_x_e() const { return omega_e() * x_e(); }
  /// Number of bound levels, i.e. the count of n with n < 1/(2 x_e) - 1/2.
  std::size_t bound_state_count() const;

  void validate() const;
};

template <typename Scalar>
struct MorseTerms {
  Scalar value;
  Scalar slope;      // dV/ds
  Scalar curvature;  // d2V/ds2
};

template <typename Scalar>
MorseTerms<Scalar> morse_potential(const Scalar& s, const MorseParams& p) {
  using std::exp;
  const Scalar e = exp(-Scalar(p.range) * (s - Scalar(p.equilibrium)));
  const Scalar one_minus = Scalar(1) - e;
  const Scalar d = Scalar(p.dissociation_energy);
  const Scalar a = Scalar(p.range);
  return {d * one_minus * one_minus, Scalar(2) * d * a * e * one_minus,
          Scalar(2) * d * a * a * e * (Scalar(2) * e - Scalar(1))};
}

/// Analytic Morse eigenenergy E_n = omega_e (n + 1/2) - omega_e x_e (n + 1/2)^2.
/// Throws std::domain_error for n beyond the bound-state range.
double morse_level(std::size_t n, const MorseParams& params);

/// Caldeira-Leggett bath with Ohmic spectral density J(w) = eta w exp(-w / w_c).
/// Frequencies are absolute (hartree); the reference system frequency
/// omega_s and system mass set the coupling scale eta = eta_eff m_s omega_s.
struct BathParams {
  std::size_t count = 0;
  double omega_c = 1.0;
  double omega_max = 1.0;
  double eta_eff = 0.0;
  bool counter_term = true;
  double system_mass = 1.0;
  double system_frequency = 1.0;

  double eta() const { return eta_eff * system_mass * system_frequency; }
  void validate() const;
};

/// Builds bath parameters with frequencies given in units of omega_s = omega_e.
BathParams make_bath(const MorseParams& morse, std::size_t count, double omega_c_rel,
                     double omega_max_rel, double eta_eff, bool counter_term);

struct BathDiscretization {
  VectorXd omega;       // strictly increasing, omega.back() == omega_max
  VectorXd coupling;    // c_i
  double normalization = 0.0;  // a; +inf for a decoupled bath

  std::size_t size() const { return static_cast<std::size_t>(omega.size()); }
  /// Integral of rho(w) = a J(w) / w from 0 to w.
  double cumulative_density(double w, const BathParams& bath) const;
};

BathDiscretization discretize_bath(const BathParams& bath);

/// Which counter-term coefficient the 1D modified reference uses.
enum class CounterTermForm {
  kHamiltonian,  // sum_i c_i^2 / (2 w_i^2), consistent with the dynamics
  kPrinted,      // (pi / 4) F_b / a, the closed form as printed in the literature
};

template <typename Scalar>
struct PotentialTerms {
  Scalar value;
  Vector<Scalar> gradient;
  Matrix<Scalar> hessian;
};

/// Morse system coordinate q[0] = s coupled bilinearly to unit-mass bath
/// oscillators q[1..] = y_i, with optional counter term.
class ModelSpec {
 public:
  ModelSpec() = default;
  ModelSpec(const MorseParams& morse, const BathParams& bath);

  const MorseParams& morse() const { return morse_; }
  const BathParams& bath() const { return bath_; }
  const BathDiscretization& discretization() const { return disc_; }

  Eigen::Index dof() const { return 1 + static_cast<Eigen::Index>(disc_.size()); }
  const VectorXd& masses() const { return masses_; }

  /// Coefficient k of k (s - s_eq)^2 added to the system potential by the counter term
  /// (zero when the counter term is off).
  double counter_term_coefficient() const;
  /// Same quantity for a given form, regardless of the counter-term flag.
  double counter_term_coefficient(CounterTermForm form) const;
  /// Sum of bath zero-point energies, sum_i w_i / 2.
  double bath_zero_point() const { return 0.5 * disc_.omega.sum(); }

  double value(const VectorXd& q) const;
  void gradient(const VectorXd& q, VectorXd& grad) const;
  /// out = H(q) X for an F x K block X. The Hessian is arrow-shaped, so this is O(F K).
  void hessian_apply(const VectorXd& q, Eigen::Ref<const RowMatrixXd> x,
                     Eigen::Ref<RowMatrixXd> out) const;
  MatrixXd hessian(const VectorXd& q) const;

  /// Stable identifier of all parameters that define H.
  std::string hash() const;

 private:
  MorseParams morse_;
  BathParams bath_;
  BathDiscretization disc_;
  VectorXd masses_;
  VectorXd omega_sq_;
  double system_ct_ = 0.0;
};

/// V, grad V and the Hessian at q for the full coupled model.
template <typename Derived>
PotentialTerms<typename Derived::Scalar> potential_full(const Eigen::MatrixBase<Derived>& q,
                                                        const ModelSpec& spec) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index f = spec.dof();
  const auto& disc = spec.discretization();
  const Scalar ds = q(0) - Scalar(spec.morse().equilibrium);
  const auto sys = morse_potential(q(0), spec.morse());
  const Scalar k = Scalar(spec.counter_term_coefficient());

  PotentialTerms<Scalar> out{sys.value + k * ds * ds, Vector<Scalar>::Zero(f),
                             Matrix<Scalar>::Zero(f, f)};
  out.gradient(0) = sys.slope + Scalar(2) * k * ds;
  out.hessian(0, 0) = sys.curvature + Scalar(2) * k;
  for (Eigen::Index i = 1; i < f; ++i) {
    const Scalar w2 = Scalar(disc.omega(i - 1) * disc.omega(i - 1));
    const Scalar c = Scalar(disc.coupling(i - 1));
    out.value += Scalar(0.5) * w2 * q(i) * q(i) + c * q(i) * ds;
    out.gradient(0) += c * q(i);
    out.gradient(i) = w2 * q(i) + c * ds;
    out.hessian(i, i) = w2;
    out.hessian(0, i) = c;
    out.hessian(i, 0) = c;
  }
  return out;
}

/// General quadratic potential V = 1/2 (q - q0)^T K (q - q0) with diagonal masses.
class QuadraticPotential {
 public:
  QuadraticPotential(VectorXd masses, MatrixXd stiffness, VectorXd center);
  /// Uncoupled oscillators with the given masses and frequencies, centred at the origin.
  static QuadraticPotential uncoupled(const VectorXd& masses, const VectorXd& omega);

  Eigen::Index dof() const { return masses_.size(); }
  const VectorXd& masses() const { return masses_; }
  double value(const VectorXd& q) const;
  void gradient(const VectorXd& q, VectorXd& grad) const;
  void hessian_apply(const VectorXd& q, Eigen::Ref<const RowMatrixXd> x,
                     Eigen::Ref<RowMatrixXd> out) const;
  MatrixXd hessian(const VectorXd&) const { return stiffness_; }

 private:
  VectorXd masses_;
  MatrixXd stiffness_;
  VectorXd center_;
};

/// Lowest levels of the 1D system potential renormalised by the counter term,
/// solved on a grid. Requires the counter term to be on.
std::vector<double> modified_morse_levels(const ModelSpec& spec, std::size_t n_levels,
                                          CounterTermForm form = CounterTermForm::kHamiltonian);

/// Lowest levels of V_Morse(s) + extra (s - s_eq)^2 from the grid eigensolver on
/// [s_eq - 3/alpha, s_eq + 8/alpha].
std::vector<double> grid_morse_levels(const MorseParams& params, std::size_t n_levels, double extra = 0.0);

/// Bath table as CSV with columns i,omega_au,c_au (i is 1-based).
void write_bath_csv(std::ostream& os, const BathDiscretization& disc);

}  // namespace mtasc

#endif  // MTASC_MODEL_HPP
