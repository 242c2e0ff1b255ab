#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "mtasc/dynamics.hpp"
#include "mtasc/scivr.hpp"

using namespace mtasc;

namespace {

ModelSpec resonant_model(std::size_t count = 10, bool ct = true) {
  const MorseParams morse;
  return ModelSpec(morse, make_bath(morse, count, 0.5, 1.0, 0.5, ct));
}

double standard_dt() { return 2.0 * kPi / MorseParams{}.omega_e() / 20.0; }

}  // namespace

TEST_CASE("free particle") {
  const VectorXd m = VectorXd::Constant(1, 2.0);
  const QuadraticPotential pot(m, MatrixXd::Zero(1, 1), VectorXd::Zero(1));
  const PhasePoint start{VectorXd::Constant(1, 0.6), VectorXd::Constant(1, -1.0)};
  const PropagationSettings ps{50, 0.1, 4, 2};
  const auto rec = propagate(start, pot, ps, harmonic_widths(m, VectorXd::Ones(1)));
  REQUIRE(rec.valid());
  for (std::size_t k = 0; k < rec.size(); k += 7) {
    const double t = static_cast<double>(k) * 0.1;
    CHECK(rec.q(k, 0) == doctest::Approx(-1.0 + 0.3 * t).epsilon(1e-13));
    CHECK(rec.p(k, 0) == 0.6);
    const auto& mono = rec.monodromy[k];
    CHECK(mono.qp()(0, 0) == doctest::Approx(t / 2.0).epsilon(1e-13));
    CHECK(mono.qq()(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mono.pp()(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(mono.pq()(0, 0)) < 1e-15);
    // Action of free motion is (p^2 / 2m) t.
    CHECK(rec.action(k) == doctest::Approx(0.09 * t).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("harmonic oscillator tangent map and prefactor") {
  const double mass = 1.7, w = 0.8;
  const VectorXd m = VectorXd::Constant(1, mass);
  const auto pot = QuadraticPotential::uncoupled(m, VectorXd::Constant(1, w));
  const WidthMatrix widths = harmonic_widths(m, VectorXd::Constant(1, w));
  const double period = 2.0 * kPi / w;
  const PropagationSettings ps{400, period / 20.0, 32, 4};
  const auto rec = propagate(PhasePoint{VectorXd::Constant(1, 0.4), VectorXd::Constant(1, 1.1)}, pot, ps, widths);
  REQUIRE(rec.valid());
  CHECK(rec.action(0) == 0.0);
  CHECK(rec.phase(0) == 0.0);
  CHECK((rec.monodromy[0].full() - MatrixXd::Identity(2, 2)).norm() == 0.0);
  double worst_map = 0.0, worst_phase = 0.0, worst_modulus = 0.0;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    const double t = static_cast<double>(k) * ps.dt;
    const auto& mono = rec.monodromy[k];
    worst_map = std::max({worst_map, std::abs(mono.qq()(0, 0) - std::cos(w * t)),
                          std::abs(mono.pp()(0, 0) - std::cos(w * t)),
                          std::abs(mono.qp()(0, 0) - std::sin(w * t) / (mass * w)) * mass * w,
                          std::abs(mono.pq()(0, 0) + mass * w * std::sin(w * t)) / (mass * w)});
    worst_phase = std::max(worst_phase, std::abs(rec.phase(k) + 0.5 * w * t));
    worst_modulus = std::max(worst_modulus, std::abs(rec.prefactor_log_modulus(k)));
  }
  // 20 periods.
  CHECK(worst_map < 1e-6);
  CHECK(worst_phase < 1e-6);
  CHECK(worst_modulus < 1e-10);
  const PrefactorSquared c2 = hk_prefactor_squared(rec.monodromy.back(), widths);
  CHECK(std::exp(c2.log_modulus) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("iodine morse energy conservation at the production step") {
  const MorseParams morse;
  const ModelSpec spec(morse, make_bath(morse, 0, 0.5, 1.0, 0.0, true));
  const ReferenceState ref = default_reference_state(spec);
  CHECK(standard_dt() == doctest::Approx(323.05).epsilon(1e-4));
  const PropagationSettings ps{16384, standard_dt(), 16, 4};
  const auto rec = propagate(ref.center(), spec, ps, ref.widths, false);
  REQUIRE(rec.valid());
  CHECK(rec.size() == 16385);
  CHECK(rec.max_relative_energy_error() < 1e-6);
  CHECK(rec.p(0, 0) == doctest::Approx(std::sqrt(morse.mass * morse.omega_e())).epsilon(1e-15));
  CHECK(rec.q(0, 0) == morse.equilibrium);
}

TEST_CASE("coupled model invariants") {
  const ModelSpec spec = resonant_model();
  const ReferenceState ref = default_reference_state(spec);
  const MixedSplit all = MixedSplit::all_hk(spec.dof());
  const PropagationSettings ps{100, standard_dt(), 16, 4};

  SUBCASE("symplecticity and energy over random samples") {
    double worst_defect = 0.0, worst_drift = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto rec = propagate(sample_initial_condition(ref, all, 3, i), spec, ps, ref.widths);
      REQUIRE(rec.valid());
      worst_defect = std::max(worst_defect, rec.monodromy.back().symplectic_defect());
      worst_drift = std::max(worst_drift, rec.max_relative_energy_error());
    }
    CHECK(worst_defect < 1e-6);
    CHECK(worst_drift < 1e-6);
  }

  SUBCASE("monodromy against finite differences") {
    const PhasePoint start = sample_initial_condition(ref, all, 5, 0);
    const auto rec = propagate(start, spec, ps, ref.widths);
    const MatrixXd m = rec.monodromy.back().full();
    const Eigen::Index f = spec.dof();
    MatrixXd fd(2 * f, 2 * f);
    for (Eigen::Index j = 0; j < 2 * f; ++j) {
      // Relative perturbation of 1e-6 in the scale of each coordinate.
      const double h = 1e-6 * (j < f ? std::sqrt(ref.widths.gamma(j)) : 1.0 / std::sqrt(ref.widths.gamma(j - f)));
      PhasePoint plus = start, minus = start;
      if (j < f) {
        plus.p(j) += h;
        minus.p(j) -= h;
      } else {
        plus.q(j - f) += h;
        minus.q(j - f) -= h;
      }
      const auto rp = propagate(plus, spec, ps, ref.widths, false);
      const auto rm = propagate(minus, spec, ps, ref.widths, false);
      VectorXd diff(2 * f);
      diff << (rp.p.bottomRows(1) - rm.p.bottomRows(1)).transpose(),
          (rp.q.bottomRows(1) - rm.q.bottomRows(1)).transpose();
      fd.col(j) = diff / (2 * h);
    }
    // Scale-free comparison: columns and rows weighted by the coherent-state widths.
    VectorXd scale(2 * f);
    scale << ref.widths.gamma.cwiseSqrt().cwiseInverse(), ref.widths.gamma.cwiseSqrt();
    const MatrixXd ms = scale.asDiagonal() * m * scale.cwiseInverse().asDiagonal();
    const MatrixXd fs = scale.asDiagonal() * fd * scale.cwiseInverse().asDiagonal();
    CHECK((ms - fs).norm() / ms.norm() < 1e-4);
  }

  SUBCASE("symplectic inverse") {
    const auto rec = propagate(ref.center(), spec, ps, ref.widths);
    const auto& m = rec.monodromy.back();
    const MatrixXd id = (m.symplectic_inverse() * m).full();
    CHECK((id - MatrixXd::Identity(id.rows(), id.cols())).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("stored phase equals recomputed phase") {
    // Saved steps fine enough for the recomputation to unwrap without substeps.
    const auto rec = propagate(ref.center(), spec, PropagationSettings{800, standard_dt() / 16.0, 1, 4}, ref.widths);
    CHECK((hk_phase(rec, ref.widths) - rec.phase).cwiseAbs().maxCoeff() < 1e-9);
    for (std::size_t k = 1; k < rec.size(); ++k) CHECK(std::abs(rec.phase(k) - rec.phase(k - 1)) < kPi);
  }
}

TEST_CASE("action obeys dS/dt = L") {
  const ModelSpec spec = resonant_model(4);
  const ReferenceState ref = default_reference_state(spec);
  const double dt = standard_dt() / 100.0;
  const auto rec = propagate(ref.center(), spec, PropagationSettings{400, dt, 4, 4}, ref.widths, false);
  REQUIRE(rec.valid());
  const VectorXd& masses = spec.masses();
  for (std::size_t k = 50; k < 400; k += 50) {
    const VectorXd p = rec.p.row(k).transpose();
    const VectorXd q = rec.q.row(k).transpose();
    const double lagrangian = 0.5 * (p.array().square() / masses.array()).sum() - spec.value(q);
    // Fourth-order central difference.
    const double ds = (-rec.action(k + 2) + 8 * rec.action(k + 1) - 8 * rec.action(k - 1) + rec.action(k - 2)) /
                      (12 * dt);
    CHECK(ds == doctest::Approx(lagrangian).epsilon(1e-6));
  }
}

TEST_CASE("monodromy submatrices") {
  const VectorXd m = VectorXd::Ones(3);
  const VectorXd w = (VectorXd(3) << 0.7, 1.0, 1.9).finished();
  const auto pot = QuadraticPotential::uncoupled(m, w);
  const MixedSplit split = MixedSplit::from_hk(3, {0});
  const auto rec = propagate(PhasePoint{VectorXd::Zero(3), VectorXd::Ones(3)}, pot,
                             PropagationSettings{60, 0.2, 64, 4}, harmonic_widths(m, w));
  const auto s0 = monodromy_submatrices(rec.monodromy[0], split);
  CHECK(s0.m11.rows() == 3);
  CHECK(s0.m11.cols() == 2);
  CHECK((s0.m11 - MatrixXd::Identity(3, 3).rightCols(2)).norm() == 0.0);
  CHECK((s0.m22 - MatrixXd::Identity(3, 3).rightCols(2)).norm() == 0.0);
  CHECK(s0.m12.norm() == 0.0);
  CHECK(s0.m21.norm() == 0.0);
  for (std::size_t k : {13u, 60u}) {
    const double t = 0.2 * static_cast<double>(k);
    const auto s = monodromy_submatrices(rec.monodromy[k], split);
    VectorXd expected = VectorXd::Zero(3);
    expected(2) = std::cos(w(2) * t);
    CHECK((s.m11.col(1) - expected).norm() < 1e-8);
  }
  const auto full = monodromy_submatrices(rec.monodromy[20], MixedSplit::from_hk(3, {}));
  CHECK((full.m11 - MatrixXd(rec.monodromy[20].pp())).norm() == 0.0);
  CHECK((full.m22 - MatrixXd(rec.monodromy[20].qq())).norm() == 0.0);
}

TEST_CASE("phase tracker") {
  PhaseTracker tracker(0.0, 0.5 * kPi);
  tracker.update({0.0, 0.0}, 0.0);
  tracker.update({0.0, 1.0}, 1.0);
  CHECK(tracker.resolved());
  CHECK(tracker.phase() == doctest::Approx(0.5));
  // Crossing the branch cut keeps the phase continuous.
  tracker.update({0.0, 2.5}, 2.0);
  tracker.update({0.0, -2.9}, 3.0);
  CHECK(tracker.phase() == doctest::Approx(0.5 * (2.0 * kPi - 2.9)));
  CHECK_FALSE(tracker.accepts({0.0, -2.9 + 2.0}, 4.0));
  tracker.update({0.0, -2.9 + 2.0}, 4.0);
  CHECK_FALSE(tracker.resolved());
}

TEST_CASE("non-finite trajectory is flagged") {
  const MorseParams morse;
  const ModelSpec spec(morse, make_bath(morse, 0, 0.5, 1.0, 0.0, true));
  const ReferenceState ref = default_reference_state(spec);
  PhasePoint start = ref.center();
  start.q(0) = -1e3;  // exp overflow on the repulsive wall
  const auto rec = propagate(start, spec, PropagationSettings{10, standard_dt(), 16, 4}, ref.widths, false);
  CHECK(rec.status == TrajectoryStatus::kNonFinite);
  CHECK_FALSE(rec.valid());
}

TEST_CASE("trajectory dump") {
  const VectorXd m = VectorXd::Ones(1);
  const auto pot = QuadraticPotential::uncoupled(m, m);
  const auto rec = propagate(PhasePoint{VectorXd::Ones(1), VectorXd::Zero(1)}, pot,
                             PropagationSettings{3, 0.1, 2, 2}, harmonic_widths(m, m));
  std::ostringstream os;
  write_trajectory_csv(os, rec);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "step,t,E,S,phi,abs_C");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 4);
}
