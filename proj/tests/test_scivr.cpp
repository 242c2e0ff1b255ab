#include <cmath>
#include <random>

#include <doctest.h>

#include "mtasc/analysis.hpp"
#include "mtasc/scivr.hpp"

using namespace mtasc;

namespace {

// <x | p, q> for one DOF.
Complex wavefunction(double x, double p, double q, double g) {
  return std::pow(g / kPi, 0.25) * std::exp(Complex(-0.5 * g * (x - q) * (x - q), p * (x - q)));
}

Complex overlap_by_quadrature(double pa, double qa, double pb, double qb, double g) {
  const double lo = -25.0, hi = 25.0;
  const int n = 200000;
  const double h = (hi - lo) / n;
  Complex sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    sum += w * std::conj(wavefunction(x, pa, qa, g)) * wavefunction(x, pb, qb, g);
  }
  return sum * h;
}

struct HarmonicCase {
  QuadraticPotential pot;
  ReferenceState ref;
  PropagationSettings prop;
};

HarmonicCase harmonic_case(const VectorXd& omega, const VectorXd& p_eq, std::size_t n_steps) {
  const VectorXd m = VectorXd::Ones(omega.size());
  ReferenceState ref{p_eq, VectorXd::Zero(omega.size()), harmonic_widths(m, omega)};
  // T = 2 pi n_steps / 16: unit-spaced levels of the fastest mode fall on bins.
  const double dt = 2.0 * kPi / omega.maxCoeff() / 16.0;
  return {QuadraticPotential::uncoupled(m, omega), ref, PropagationSettings{n_steps, dt, 8, 4}};
}

std::vector<TrajectoryRecord> harmonic_records(const HarmonicCase& c, const MixedSplit& split, std::size_t n,
                                               std::uint64_t seed) {
  std::vector<TrajectoryRecord> out;
  for (const auto& z : sample_initial_conditions(c.ref, split, n, seed)) {
    out.push_back(propagate(z, c.pot, c.prop, c.ref.widths));
  }
  return out;
}

EstimatorSettings settings_for(const HarmonicCase& c, const MixedSplit& split, Method method) {
  EstimatorSettings s;
  s.method = method;
  s.split = split;
  s.n_steps = c.prop.n_steps;
  s.dt = c.prop.dt;
  s.t1_stride = 1;
  s.e_min = 0.0;
  return s;
}

std::vector<double> peak_energies(const SpectrumGrid& spec, double threshold) {
  std::vector<double> out;
  for (const auto& p : detect_peaks(normalize(spec), {threshold, 0.0}).peaks) out.push_back(p.energy);
  return out;
}

double relative_l2(const SpectrumGrid& a, const SpectrumGrid& b) { return compare_spectra(a, b).relative_l2; }

}  // namespace

TEST_CASE("coherent-state overlap") {
  const WidthMatrix one{VectorXd::Ones(1)};
  const PhasePoint origin{VectorXd::Zero(1), VectorXd::Zero(1)};
  const PhasePoint shifted{VectorXd::Zero(1), VectorXd::Constant(1, 2.0)};
  CHECK(std::abs(coherent_overlap(origin, shifted, one) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(overlap_by_quadrature(0, 0, 0, 2, 1.0) - std::exp(-1.0)) < 1e-10);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 5; ++trial) {
    const double g = 0.5 + std::abs(u(rng));
    const double pa = u(rng), qa = u(rng), pb = u(rng), qb = u(rng);
    const WidthMatrix w{VectorXd::Constant(1, g)};
    const Complex c = coherent_overlap(PhasePoint{VectorXd::Constant(1, pa), VectorXd::Constant(1, qa)},
                                       PhasePoint{VectorXd::Constant(1, pb), VectorXd::Constant(1, qb)}, w);
    CHECK(std::abs(c - overlap_by_quadrature(pa, qa, pb, qb, g)) < 1e-10);
    CHECK(std::abs(c) < 1.0);
  }

  // Product over DOFs, unit modulus only at coincidence.
  const WidthMatrix w3{(VectorXd(3) << 0.3, 1.0, 4.0).finished()};
  const PhasePoint a{VectorXd::Random(3), VectorXd::Random(3)};
  PhasePoint b{VectorXd::Random(3), VectorXd::Random(3)};
  CHECK(std::abs(coherent_overlap(a, a, w3) - 1.0) < 1e-15);
  Complex product = 1.0;
  for (Eigen::Index i = 0; i < 3; ++i) {
    product *= coherent_overlap(PhasePoint{a.p.segment(i, 1), a.q.segment(i, 1)},
                                PhasePoint{b.p.segment(i, 1), b.q.segment(i, 1)}, WidthMatrix{w3.gamma.segment(i, 1)});
  }
  CHECK(std::abs(coherent_overlap(a, b, w3) - product) < 1e-15);
  CHECK(std::abs(coherent_overlap(a, b, w3)) < 1.0);
}

TEST_CASE("initial-condition sampling") {
  const VectorXd omega = (VectorXd(2) << 1.0, 2.5).finished();
  const ReferenceState ref{(VectorXd(2) << 0.7, 0.0).finished(), (VectorXd(2) << -0.2, 0.4).finished(),
                           harmonic_widths(VectorXd::Ones(2), omega)};
  CHECK(husimi_weight(ref.center(), ref, {0, 1}) == 1.0);

  SUBCASE("nothing sampled without HK DOFs") {
    for (const auto& z : sample_initial_conditions(ref, MixedSplit::from_hk(2, {}), 10, 4)) {
      CHECK(z.p == ref.p_eq);
      CHECK(z.q == ref.q_eq);
    }
  }
  SUBCASE("TG DOFs stay at the centre") {
    for (const auto& z : sample_initial_conditions(ref, MixedSplit::from_hk(2, {0}), 50, 4)) {
      CHECK(z.p(1) == ref.p_eq(1));
      CHECK(z.q(1) == ref.q_eq(1));
    }
  }
  SUBCASE("sample index is independent of the batch size") {
    const auto few = sample_initial_conditions(ref, MixedSplit::all_hk(2), 3, 99);
    const auto many = sample_initial_conditions(ref, MixedSplit::all_hk(2), 30, 99);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(few[i].p == many[i].p);
      CHECK(few[i].q == many[i].q);
      CHECK(sample_initial_condition(ref, MixedSplit::all_hk(2), 99, i).q == many[i].q);
    }
    CHECK(sample_initial_condition(ref, MixedSplit::all_hk(2), 100, 0).q != many[0].q);
  }
  SUBCASE("moments of the Husimi density") {
    const std::size_t n = 100000;
    const auto zs = sample_initial_conditions(ref, MixedSplit::all_hk(2), n, 1);
    for (Eigen::Index i = 0; i < 2; ++i) {
      // |<p,q|chi>|^2 = exp(-gamma dq^2 / 2 - dp^2 / (2 gamma)).
      const double sq = 1.0 / std::sqrt(ref.widths.gamma(i));
      const double sp = std::sqrt(ref.widths.gamma(i));
      double mq = 0, mp = 0, vq = 0, vp = 0;
      for (const auto& z : zs) {
        mq += z.q(i);
        mp += z.p(i);
      }
      mq /= n;
      mp /= n;
      for (const auto& z : zs) {
        vq += (z.q(i) - mq) * (z.q(i) - mq);
        vp += (z.p(i) - mp) * (z.p(i) - mp);
      }
      vq /= n - 1;
      vp /= n - 1;
      CHECK(std::abs(mq - ref.q_eq(i)) < 3.0 * sq / std::sqrt(double(n)));
      CHECK(std::abs(mp - ref.p_eq(i)) < 3.0 * sp / std::sqrt(double(n)));
      CHECK(vq == doctest::Approx(sq * sq).epsilon(0.02));
      CHECK(vp == doctest::Approx(sp * sp).epsilon(0.02));
    }
  }
}

TEST_CASE("thawed-Gaussian auxiliary quantities") {
  const VectorXd omega = (VectorXd(3) << 1.0, 0.6, 1.4).finished();
  const auto c = harmonic_case(omega, (VectorXd(3) << 1.0, 0.0, 0.0).finished(), 200);
  const MixedSplit split = MixedSplit::from_hk(3, {0});
  const auto rec = propagate(sample_initial_condition(c.ref, split, 2, 0), c.pot, c.prop, c.ref.widths);

  const TgAuxiliary a0 = tg_auxiliary(rec, split, c.ref, 0);
  REQUIRE(a0.size() == 4);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const double g = c.ref.widths.gamma(split.tg[j]);
    CHECK(a0.a(j, j) == doctest::Approx(0.25 / g).epsilon(1e-15));
    CHECK(a0.a(2 + j, 2 + j) == doctest::Approx(0.25 * g).epsilon(1e-15));
  }
  CHECK(a0.a.block(0, 2, 2, 2).norm() == 0.0);
  CHECK(a0.b.norm() == 0.0);
  CHECK(a0.positive_definite);

  // Matched widths make A a constant of the motion for a decoupled harmonic bath.
  double worst_sym = 0.0, worst_const = 0.0;
  for (std::size_t k = 0; k < rec.size(); k += 2) {
    const TgAuxiliary ak = tg_auxiliary(rec, split, c.ref, k);
    worst_sym = std::max(worst_sym, (ak.a - ak.a.transpose()).cwiseAbs().maxCoeff());
    worst_const = std::max(worst_const, (ak.a - a0.a).cwiseAbs().maxCoeff());
    CHECK(ak.positive_definite);
  }
  CHECK(worst_sym < 1e-12);
  CHECK(worst_const < 1e-6);
}

TEST_CASE("method names") {
  for (Method m : {Method::kTaSeparable, Method::kTaFull, Method::kMixedSeparable, Method::kMixedFull}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(to_string(Method::kMixedSeparable) == "mixed-sep");
  CHECK_THROWS_AS(parse_method("hk"), std::invalid_argument);
}

TEST_CASE("harmonic exactness of the estimators") {
  const auto c = harmonic_case(VectorXd::Ones(1), VectorXd::Constant(1, 1.0), 512);
  const MixedSplit hk = MixedSplit::all_hk(1);
  const auto records = harmonic_records(c, hk, 16, 3);

  const SpectrumGrid sep = ta_separable(records, c.ref, settings_for(c, hk, Method::kTaSeparable));
  const SpectrumGrid full = ta_full(records, c.ref, settings_for(c, hk, Method::kTaFull));
  const SpectrumGrid msep = mixed_separable(records, c.ref, settings_for(c, hk, Method::kMixedSeparable));
  const SpectrumGrid mfull = mixed_full(records, c.ref, settings_for(c, hk, Method::kMixedFull));

  CHECK(sep.intensity.minCoeff() >= 0.0);
  CHECK(relative_l2(sep, full) < 1e-8);
  CHECK(relative_l2(sep, msep) < 1e-10);
  CHECK(relative_l2(full, mfull) < 1e-10);
  for (const SpectrumGrid* s : {&sep, &full}) {
    const auto e = peak_energies(*s, 1e-3);
    REQUIRE(e.size() >= 4);
    for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs(e[n] - (n + 0.5)) < sep.e_step);
  }
  // Coherent state with |alpha|^2 = 1/2: Poisson heights 1 : 1/2 : 1/8 once the
  // phase-space average converges.
  const auto many = harmonic_records(c, hk, 4000, 8);
  const PeakList peaks =
      detect_peaks(normalize(ta_separable(many, c.ref, settings_for(c, hk, Method::kTaSeparable))), {1e-3, 0.0});
  CHECK(peaks.peaks[1].height / peaks.peaks[0].height == doctest::Approx(0.5).epsilon(0.05));
  CHECK(peaks.peaks[2].height / peaks.peaks[0].height == doctest::Approx(0.125).epsilon(0.05));
}

TEST_CASE("mixed estimators on an uncoupled two-mode oscillator") {
  const VectorXd omega = (VectorXd(2) << 1.0, 1.7).finished();
  const auto c = harmonic_case(omega, (VectorXd(2) << 1.0, 0.0).finished(), 512);
  const MixedSplit split = MixedSplit::from_hk(2, {0});
  const auto records = harmonic_records(c, split, 8, 5);
  const SpectrumGrid msep = mixed_separable(records, c.ref, settings_for(c, split, Method::kMixedSeparable));
  const SpectrumGrid mfull = mixed_full(records, c.ref, settings_for(c, split, Method::kMixedFull));
  // The TG mode starts in its ground state, so both forms are exact.
  CHECK(relative_l2(msep, mfull) < 1e-8);
  const auto e = peak_energies(msep, 1e-3);
  REQUIRE(e.size() >= 3);
  for (std::size_t n = 0; n < 3; ++n) CHECK(std::abs(e[n] - (n + 0.5 + 0.85)) < msep.e_step);
}

TEST_CASE("estimator input checks") {
  const auto c = harmonic_case(VectorXd::Ones(1), VectorXd::Constant(1, 1.0), 64);
  const MixedSplit hk = MixedSplit::all_hk(1);
  CHECK_THROWS_AS(ta_separable({}, c.ref, settings_for(c, hk, Method::kTaSeparable)), std::invalid_argument);
  auto records = harmonic_records(c, hk, 2, 1);
  EstimatorSettings wrong = settings_for(c, hk, Method::kTaSeparable);
  wrong.n_steps = 32;
  CHECK_THROWS_AS(ta_separable(records, c.ref, wrong), std::invalid_argument);
  records[0].status = TrajectoryStatus::kNonFinite;
  records[1].status = TrajectoryStatus::kNonFinite;
  CHECK_THROWS_AS(ta_separable(records, c.ref, settings_for(c, hk, Method::kTaSeparable)), NumericalError);
}
