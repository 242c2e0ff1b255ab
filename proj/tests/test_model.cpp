#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "mtasc/grid_eigensolver.hpp"
#include "mtasc/model.hpp"

using namespace mtasc;

namespace {

ModelSpec bath_model(std::size_t count, double wc, double wm, double eta, bool ct) {
  const MorseParams morse;
  return ModelSpec(morse, make_bath(morse, count, wc, wm, eta, ct));
}

}  // namespace

TEST_CASE("iodine constants") {
  const MorseParams p;
  // Literature value quoted to four digits.
  CHECK(p.omega_e() == doctest::Approx(9.724e-4).epsilon(1e-4));
  CHECK(p.x_e() == doctest::Approx(4.264e-3).epsilon(1e-3));
  const double curvature = 2.0 * 0.057 * 0.983 * 0.983;
  CHECK(curvature == doctest::Approx(0.11015695).epsilon(1e-8));
  const auto at_min = morse_potential(p.equilibrium, p);
  CHECK(at_min.value == 0.0);
  CHECK(at_min.slope == 0.0);
  CHECK(at_min.curvature == doctest::Approx(curvature).epsilon(1e-14));
  CHECK(std::sqrt(at_min.curvature / p.mass) == doctest::Approx(p.omega_e()).epsilon(1e-14));
  CHECK(morse_potential(p.equilibrium + 60.0, p).value == doctest::Approx(p.dissociation_energy).epsilon(1e-14));
}

TEST_CASE("morse derivatives match central differences") {
  const MorseParams p;
  const double h = 1e-5;
  for (double s : {4.2, 4.8, 5.001, 5.5, 6.7, 9.0}) {
    const auto t = morse_potential(s, p);
    const double dv = (morse_potential(s + h, p).value - morse_potential(s - h, p).value) / (2 * h);
    const double d2v = (morse_potential(s + h, p).slope - morse_potential(s - h, p).slope) / (2 * h);
    const double scale = 2.0 * p.dissociation_energy * p.range;
    CHECK(std::abs(t.slope - dv) <= 1e-8 * scale);
    CHECK(std::abs(t.curvature - d2v) <= 1e-8 * scale * p.range);
  }
}

TEST_CASE("morse levels") {
  const MorseParams p;
  const double w = p.omega_e();
  const double wx = w * w / (4.0 * p.dissociation_energy);
  CHECK(morse_level(0, p) == doctest::Approx(0.5 * w - 0.25 * wx).epsilon(1e-14));
  // Reference values built from the four-digit omega_e and x_e.
  CHECK(std::abs(morse_level(0, p) - 4.85163e-4) < 1e-8);
  CHECK(std::abs(morse_level(1, p) - morse_level(0, p) - 9.6411e-4) < 1e-8);
  CHECK(morse_level(1, p) - morse_level(0, p) == doctest::Approx(w * (1.0 - 2.0 * p.x_e())).epsilon(1e-13));
  for (std::size_t n = 1; n + 1 < 10; ++n) {
    CHECK(morse_level(n + 1, p) - morse_level(n, p) < morse_level(n, p) - morse_level(n - 1, p));
  }
  CHECK_THROWS_AS(morse_level(p.bound_state_count(), p), std::domain_error);
  CHECK_NOTHROW(morse_level(p.bound_state_count() - 1, p));

  // Harmonic limit: an infinitely deep well with the same curvature.
  MorseParams deep = p;
  deep.dissociation_energy = 1e12;
  deep.range = std::sqrt(p.omega_e() * p.omega_e() * p.mass / (2.0 * deep.dissociation_energy));
  CHECK(morse_level(3, deep) == doctest::Approx(3.5 * deep.omega_e()).epsilon(1e-12));

  MorseParams bad = p;
  bad.mass = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("bath discretization") {
  const MorseParams morse;
  const double ws = morse.omega_e();

  SUBCASE("single mode sits at omega_max") {
    for (double wc : {0.1, 0.5, 3.0}) {
      const auto d = discretize_bath(make_bath(morse, 1, wc, 0.7, 0.5, true));
      REQUIRE(d.size() == 1);
      CHECK(d.omega(0) == doctest::Approx(0.7 * ws).epsilon(1e-15));
    }
  }
  SUBCASE("two modes") {
    const auto d = discretize_bath(make_bath(morse, 2, 0.5, 1.0, 0.5, true));
    CHECK(d.omega(0) / ws == doctest::Approx(0.283111).epsilon(2e-6));
    CHECK(d.omega(1) / ws == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("identities") {
    for (std::size_t f : {10u, 20u, 40u, 60u}) {
      const BathParams b = make_bath(morse, f, 0.5, 1.0, 0.5, true);
      const auto d = discretize_bath(b);
      CHECK(std::abs(d.omega(f - 1) - b.omega_max) <= 4e-16 * b.omega_max);
      const double a_expected =
          static_cast<double>(f) / (b.eta() * b.omega_c * (1.0 - std::exp(-b.omega_max / b.omega_c)));
      CHECK(d.normalization == doctest::Approx(a_expected).epsilon(1e-14));
      for (std::size_t i = 0; i < f; ++i) {
        if (i > 0) CHECK(d.omega(i) > d.omega(i - 1));
        // Counting function a eta w_c (1 - e^{-w/w_c}) evaluated independently.
        const double count = a_expected * b.eta() * b.omega_c * (1.0 - std::exp(-d.omega(i) / b.omega_c));
        CHECK(count == doctest::Approx(static_cast<double>(i + 1)).epsilon(1e-10));
        CHECK(d.cumulative_density(d.omega(i), b) == doctest::Approx(static_cast<double>(i + 1)).epsilon(1e-10));
        CHECK(d.coupling(i) * d.coupling(i) ==
              doctest::Approx(2.0 / kPi * d.omega(i) * d.omega(i) / a_expected).epsilon(1e-13));
      }
    }
  }
  SUBCASE("zero coupling") {
    const auto d = discretize_bath(make_bath(morse, 5, 0.5, 1.0, 0.0, true));
    CHECK(d.coupling.cwiseAbs().maxCoeff() == 0.0);
    CHECK(d.omega(4) == doctest::Approx(ws).epsilon(1e-15));
  }
  SUBCASE("empty bath") {
    const auto d = discretize_bath(make_bath(morse, 0, 0.5, 1.0, 0.5, true));
    CHECK(d.size() == 0);
  }
  SUBCASE("csv") {
    std::ostringstream os;
    write_bath_csv(os, discretize_bath(make_bath(morse, 3, 0.5, 1.0, 0.5, true)));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "i,omega_au,c_au");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
  }
}

TEST_CASE("coupled potential") {
  const ModelSpec ct = bath_model(10, 0.5, 1.0, 0.5, true);
  const ModelSpec no_ct = bath_model(10, 0.5, 1.0, 0.5, false);
  const MorseParams& m = ct.morse();

  SUBCASE("minimum") {
    VectorXd q = VectorXd::Zero(ct.dof());
    q(0) = m.equilibrium;
    for (const ModelSpec* spec : {&ct, &no_ct}) {
      VectorXd g;
      spec->gradient(q, g);
      CHECK(spec->value(q) == 0.0);
      CHECK(g.cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SUBCASE("counter term") {
    const auto& d = ct.discretization();
    const double k_hamiltonian = static_cast<double>(d.size()) / (kPi * d.normalization);
    CHECK(ct.counter_term_coefficient() == doctest::Approx(k_hamiltonian).epsilon(1e-13));
    CHECK(no_ct.counter_term_coefficient() == 0.0);
    CHECK(ct.counter_term_coefficient(CounterTermForm::kPrinted) ==
          doctest::Approx(kPi / 4.0 * static_cast<double>(d.size()) / d.normalization).epsilon(1e-14));
    VectorXd q = VectorXd::Zero(ct.dof());
    q(0) = m.equilibrium + 0.3;
    CHECK(ct.value(q) - no_ct.value(q) == doctest::Approx(k_hamiltonian * 0.09).epsilon(1e-10));
  }

  SUBCASE("separable without coupling") {
    const ModelSpec free = bath_model(4, 0.5, 1.0, 0.0, true);
    VectorXd q(5);
    q << 5.4, 0.3, -0.2, 0.7, 0.1;
    double expected = morse_potential(q(0), m).value;
    for (Eigen::Index i = 1; i < 5; ++i) {
      const double w = free.discretization().omega(i - 1);
      expected += 0.5 * w * w * q(i) * q(i);
    }
    CHECK(free.value(q) == doctest::Approx(expected).epsilon(1e-14));
  }

  SUBCASE("derivatives match finite differences") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    const Eigen::Index f = no_ct.dof();
    for (int trial = 0; trial < 100; ++trial) {
      VectorXd q(f);
      q(0) = m.equilibrium + 0.3 * nd(rng);
      for (Eigen::Index i = 1; i < f; ++i) q(i) = 30.0 * nd(rng);
      for (const ModelSpec* spec : {&ct, &no_ct}) {
        VectorXd g;
        spec->gradient(q, g);
        const MatrixXd hess = spec->hessian(q);
        const auto ad = potential_full(q, *spec);
        CHECK(ad.value == doctest::Approx(spec->value(q)).epsilon(1e-12));
        CHECK((ad.gradient - g).norm() <= 1e-12 * g.norm() + 1e-300);
        CHECK((ad.hessian - hess).norm() <= 1e-12 * hess.norm());
        for (Eigen::Index j = 0; j < f; ++j) {
          const double h = j == 0 ? 1e-5 : 1e-3;
          VectorXd qp = q, qm = q;
          qp(j) += h;
          qm(j) -= h;
          const double fd = (spec->value(qp) - spec->value(qm)) / (2 * h);
          CHECK(std::abs(fd - g(j)) <= 1e-6 * g.cwiseAbs().maxCoeff());
          VectorXd gp, gm;
          spec->gradient(qp, gp);
          spec->gradient(qm, gm);
          const VectorXd col = (gp - gm) / (2 * h);
          CHECK((col - hess.col(j)).cwiseAbs().maxCoeff() <= 1e-6 * hess.cwiseAbs().maxCoeff());
        }
        RowMatrixXd x = RowMatrixXd::Random(f, 2 * f);
        RowMatrixXd out(f, 2 * f);
        spec->hessian_apply(q, x, out);
        CHECK((MatrixXd(out) - hess * MatrixXd(x)).norm() <= 1e-12 * (hess * MatrixXd(x)).norm());
        CHECK(hess(0, 3) == doctest::Approx(spec->discretization().coupling(2)).epsilon(1e-15));
      }
    }
  }

  SUBCASE("hash") {
    CHECK(ct.hash() == bath_model(10, 0.5, 1.0, 0.5, true).hash());
    CHECK(ct.hash() != no_ct.hash());
    CHECK(ct.hash() != bath_model(11, 0.5, 1.0, 0.5, true).hash());
  }
}

TEST_CASE("grid eigensolver") {
  SUBCASE("harmonic") {
    const double k = 2.5, mass = 3.0;
    const auto levels = grid_eigensolve([k](double s) { return 0.5 * k * s * s; }, mass, {-8.0, 8.0}, 6);
    const double w = std::sqrt(k / mass);
    for (std::size_t n = 0; n < 6; ++n) CHECK(std::abs(levels[n] - w * (n + 0.5)) < 1e-9);
  }
  SUBCASE("iodine morse") {
    const MorseParams p;
    const auto levels = grid_morse_levels(p, 6);
    for (std::size_t n = 0; n < 6; ++n) CHECK(std::abs(levels[n] - morse_level(n, p)) < 1e-9);
  }
  SUBCASE("counter-term renormalised levels") {
    const ModelSpec decoupled = bath_model(20, 0.5, 1.0, 0.0, true);
    const auto same = modified_morse_levels(decoupled, 5);
    for (std::size_t n = 0; n < 5; ++n) CHECK(std::abs(same[n] - morse_level(n, decoupled.morse())) < 1e-9);

    const ModelSpec resonant = bath_model(20, 0.5, 1.0, 0.5, true);
    const auto up = modified_morse_levels(resonant, 5);
    for (std::size_t n = 0; n < 5; ++n) CHECK(up[n] > morse_level(n, resonant.morse()));
    // A stiffer added well shifts the levels further.
    const auto printed = modified_morse_levels(resonant, 5, CounterTermForm::kPrinted);
    for (std::size_t n = 0; n < 5; ++n) CHECK(printed[n] > up[n]);

    CHECK_THROWS_AS(modified_morse_levels(bath_model(20, 0.5, 1.0, 0.5, false), 5), std::invalid_argument);
  }
  SUBCASE("unresolvable request") {
    GridSolveOptions opts;
    opts.n_points = 128;
    opts.max_points = 256;
    opts.tolerance = 1e-18;
    CHECK_THROWS_AS(grid_eigensolve([](double s) { return 0.5 * s * s; }, 1.0, {-6.0, 6.0}, 3, opts),
                    NumericalError);
  }
}
