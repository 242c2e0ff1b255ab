#include "mtasc/scivr.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mtasc {

void ReferenceState::validate() const {
  if (p_eq.size() != q_eq.size() || widths.dof() != q_eq.size()) {
    throw std::invalid_argument("ReferenceState: dimension mismatch");
  }
  widths.validate();
}

ReferenceState default_reference_state(const ModelSpec& spec) {
  ReferenceState ref;
  ref.widths = canonical_widths(spec);
  ref.p_eq = VectorXd::Zero(spec.dof());
  ref.q_eq = VectorXd::Zero(spec.dof());
  ref.p_eq(0) = std::sqrt(spec.morse().mass * spec.morse().omega_e());
  ref.q_eq(0) = spec.morse().equilibrium;
  return ref;
}

Complex coherent_overlap(const PhasePoint& a, const PhasePoint& b, const WidthMatrix& widths) {
  const auto g = widths.gamma.array();
  const auto dq = (b.q - a.q).array();
  const auto dp = (b.p - a.p).array();
  const double re = -0.25 * (g * dq.square()).sum() - 0.25 / (kHbar * kHbar) * (dp.square() / g).sum();
  const double im = -0.5 / kHbar * ((a.p + b.p).array() * dq).sum();
  return std::exp(Complex(re, im));
}

double husimi_weight(const PhasePoint& z, const ReferenceState& ref, const std::vector<Eigen::Index>& dofs) {
  double e = 0.0;
  for (const Eigen::Index i : dofs) {
    const double g = ref.widths.gamma(i);
    const double dq = z.q(i) - ref.q_eq(i);
    const double dp = z.p(i) - ref.p_eq(i);
    e += 0.5 * g * dq * dq + 0.5 * dp * dp / (g * kHbar * kHbar);
  }
  return std::exp(-e);
}

PhasePoint sample_initial_condition(const ReferenceState& ref, const MixedSplit& split, std::uint64_t seed,
                                    std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  PhasePoint z = ref.center();
  for (const Eigen::Index i : split.hk) {
    const double g = ref.widths.gamma(i);
    z.q(i) += normal(rng) / std::sqrt(g);
    z.p(i) += normal(rng) * kHbar * std::sqrt(g);
  }
  return z;
}

std::vector<PhasePoint> sample_initial_conditions(const ReferenceState& ref, const MixedSplit& split,
                                                  std::size_t n, std::uint64_t seed) {
  split.validate(ref.dof());
  std::vector<PhasePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_initial_condition(ref, split, seed, i));
  return out;
}

TgAuxiliary tg_auxiliary(const MonodromyMatrix& m, const PhasePoint& z, const ReferenceState& ref,
                         const MixedSplit& split) {
  const Eigen::Index f = m.dof();
  const Eigen::Index n = split.tg_count();
  const VectorXd& gamma = ref.widths.gamma;
  MatrixXd q(f, 2 * n);
  MatrixXd p(f, 2 * n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index j = split.tg[static_cast<std::size_t>(c)];
    q.col(c) = m.qp().col(j);
    q.col(n + c) = m.qq().col(j);
    p.col(c) = m.pp().col(j);
    p.col(n + c) = m.pq().col(j);
  }
  const VectorXd sg = gamma.cwiseSqrt();
  MatrixXd x(2 * f, 2 * n);
  x.topRows(f) = sg.asDiagonal() * q;
  x.bottomRows(f) = (sg * kHbar).cwiseInverse().asDiagonal() * p;

  TgAuxiliary aux;
  aux.a.setZero(2 * n, 2 * n);
  aux.a.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 0.25);
  aux.a.triangularView<Eigen::StrictlyUpper>() = aux.a.transpose();
  const VectorXd dq = z.q - ref.q_eq;
  const VectorXd dp = z.p - ref.p_eq;
  const VectorXd re = -0.5 * q.transpose() * gamma.cwiseProduct(dq) -
                      0.5 / (kHbar * kHbar) * p.transpose() * dp.cwiseQuotient(gamma);
  const VectorXd im = 0.5 / kHbar * (q.transpose() * dp - p.transpose() * dq);
  aux.b = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
  if (n > 0) {
    Eigen::LLT<MatrixXd> llt(aux.a);
    aux.positive_definite = llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0.0).all();
  }
  return aux;
}

TgAuxiliary tg_auxiliary(const TrajectoryRecord& record, const MixedSplit& split, const ReferenceState& ref,
                         std::size_t step) {
  if (step >= record.monodromy.size()) throw std::out_of_range("tg_auxiliary: step not stored");
  return tg_auxiliary(record.monodromy[step], record.point(step), ref, split);
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kTaSeparable: return "ta-sep";
    case Method::kTaFull: return "ta-full";
    case Method::kMixedSeparable: return "mixed-sep";
    case Method::kMixedFull: return "mixed-full";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kTaSeparable, Method::kTaFull, Method::kMixedSeparable, Method::kMixedFull}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

const char* to_string(EstimatorStatus s) {
  switch (s) {
    case EstimatorStatus::kOk: return "ok";
    case EstimatorStatus::kNotPositiveDefinite: return "not-positive-definite";
    case EstimatorStatus::kPhaseUnresolved: return "phase-unresolved";
    case EstimatorStatus::kNonFinite: return "non-finite";
  }
  return "unknown";
}

namespace {

constexpr double kCosLimit = 0.70710678118654752;

bool is_full(Method m) { return m == Method::kTaFull || m == Method::kMixedFull; }
bool is_mixed(Method m) { return m == Method::kMixedSeparable || m == Method::kMixedFull; }

// Continuous square root of C^2 along a row of the double-time grid. The
// expected rotation `rate` is removed before the sign of the root is chosen.
class RootTracker {
 public:
  bool ok() const { return ok_; }

  // `turn` = exp(i rate tau), `half` = exp(-i rate tau / 2).
  Complex next(Complex c2, Complex turn, Complex half) {
    Complex r = std::sqrt(c2 * turn);
    double overlap = (r * std::conj(prev_)).real();
    if (overlap < 0.0) {
      r = -r;
      overlap = -overlap;
    }
    // Residual root may turn by at most pi/4 per step.
    if (overlap < kCosLimit * std::abs(r) * std::abs(prev_)) ok_ = false;
    prev_ = r;
    return r * half;
  }

 private:
  Complex prev_{1.0, 0.0};
  bool ok_ = true;
};

}  // namespace

void EstimatorSettings::validate(Eigen::Index dof) const {
  if (n_steps == 0 || (n_steps & (n_steps - 1)) != 0) {
    throw std::invalid_argument("estimator: n_steps must be a power of two");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("estimator: dt must be positive");
  if (padding == 0 || (padding & (padding - 1)) != 0) {
    throw std::invalid_argument("estimator: padding must be a power of two");
  }
  if (t1_stride == 0 || n_steps % t1_stride != 0) {
    throw std::invalid_argument("estimator: t1_stride must divide n_steps");
  }
  if (!std::isfinite(e_min)) throw std::invalid_argument("estimator: e_min must be finite");
  if (is_mixed(method)) split.validate(dof);
}

TrajectorySpectrum::TrajectorySpectrum(const ReferenceState& ref, const EstimatorSettings& settings)
    : ref_(ref), settings_(settings), n_(settings.n_steps), length_(settings.n_bins()) {
  ref_.validate();
  if (!is_mixed(settings_.method)) settings_.split = MixedSplit::all_hk(ref_.dof());
  settings_.validate(ref_.dof());
  series_.resize(static_cast<Eigen::Index>(n_ + 1));
  fft_in_.resize(length_);
  fft_out_.resize(length_);
  if (is_full(settings_.method)) lag_.resize(static_cast<Eigen::Index>(n_ + 1));
  if (settings_.method == Method::kTaFull) monodromy_.resize(n_ + 1);
  if (settings_.method == Method::kMixedFull) {
    a_.resize(n_ + 1);
    b_.resize(n_ + 1);
  }
}

void TrajectorySpectrum::begin(const PhasePoint& start) {
  if (start.dof() != ref_.dof()) throw std::invalid_argument("TrajectorySpectrum: dimension mismatch");
  weight_ = husimi_weight(start, ref_, settings_.split.hk);
  const double t = settings_.total_time();
  const double tg = static_cast<double>(settings_.split.tg_count());
  const double time_norm = is_full(settings_.method) ? kPi * kHbar * t : 2.0 * kPi * kHbar * t;
  norm_ = std::pow(2.0 * kHbar, -tg) / (time_norm * weight_);
  status_ = (weight_ > 0.0 && std::isfinite(norm_)) ? EstimatorStatus::kOk : EstimatorStatus::kNonFinite;
  seen_ = 0;
}

Complex TrajectorySpectrum::reference_amplitude(const TrajectoryStep& step) const {
  const Complex overlap = coherent_overlap(ref_.center(), step.point, ref_.widths);
  return overlap * std::polar(1.0, step.action / kHbar);
}

void TrajectorySpectrum::operator()(const TrajectoryStep& step) {
  if (step.index != seen_ || step.index > n_) throw std::logic_error("TrajectorySpectrum: steps out of order");
  ++seen_;
  // Mean rotation of C^2 over the trajectory; removed before tracking composite roots.
  if (step.index == n_) rate_ = -2.0 * step.phase / settings_.total_time();
  if (status_ != EstimatorStatus::kOk) return;
  const auto k = static_cast<Eigen::Index>(step.index);
  const Complex g = reference_amplitude(step);
  const Complex phase = std::polar(1.0, step.phase / kHbar);
  switch (settings_.method) {
    case Method::kTaSeparable:
      series_(k) = g * phase;
      break;
    case Method::kTaFull:
      series_(k) = g;
      monodromy_[step.index] = step.monodromy;
      break;
    case Method::kMixedSeparable: {
      Complex factor(1.0, 0.0);
      if (settings_.split.tg_count() > 0) {
        const TgAuxiliary aux = tg_auxiliary(step.monodromy, step.point, ref_, settings_.split);
        if (!aux.positive_definite) {
          status_ = EstimatorStatus::kNotPositiveDefinite;
          return;
        }
        llt_.compute(2.0 * aux.a);
        const double log_det = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
        const VectorXd xr = llt_.solve(aux.b.real());
        const VectorXd xi = llt_.solve(aux.b.imag());
        const VectorXcd x = xr.cast<Complex>() + Complex(0.0, 1.0) * xi.cast<Complex>();
        factor = std::exp(-0.25 * log_det + 0.25 * aux.b.cwiseProduct(x).sum());
      }
      series_(k) = g * phase * factor;
      break;
    }
    case Method::kMixedFull: {
      series_(k) = g * phase;
      const TgAuxiliary aux = tg_auxiliary(step.monodromy, step.point, ref_, settings_.split);
      if (!aux.positive_definite) {
        status_ = EstimatorStatus::kNotPositiveDefinite;
        return;
      }
      a_[step.index] = aux.a;
      b_[step.index] = aux.b;
      break;
    }
  }
  if (!std::isfinite(series_(k).real()) || !std::isfinite(series_(k).imag())) {
    status_ = EstimatorStatus::kNonFinite;
  }
}

double TrajectorySpectrum::time_weight(std::size_t k) const {
  return (k == 0 || k == n_) ? 0.5 * settings_.dt : settings_.dt;
}

EstimatorStatus TrajectorySpectrum::finish(Eigen::Ref<VectorXd> accumulator) {
  if (static_cast<std::size_t>(accumulator.size()) != length_) {
    throw std::invalid_argument("TrajectorySpectrum: accumulator size mismatch");
  }
  if (status_ == EstimatorStatus::kOk && seen_ != n_ + 1) status_ = EstimatorStatus::kNonFinite;
  if (status_ != EstimatorStatus::kOk) return status_;
  switch (settings_.method) {
    case Method::kTaSeparable:
    case Method::kMixedSeparable:
      finish_separable(accumulator);
      break;
    case Method::kTaFull:
      finish_ta_full(accumulator);
      break;
    case Method::kMixedFull:
      finish_mixed_full(accumulator);
      break;
  }
  return status_;
}

void TrajectorySpectrum::finish_separable(Eigen::Ref<VectorXd> acc) {
  std::fill(fft_in_.begin(), fft_in_.end(), Complex(0.0, 0.0));
  for (std::size_t k = 0; k <= n_; ++k) {
    const double t = static_cast<double>(k) * settings_.dt;
    const Complex u = time_weight(k) * series_(static_cast<Eigen::Index>(k)) *
                      std::polar(1.0, settings_.e_min * t / kHbar);
    fft_in_[k % length_] += std::conj(u);
  }
  fft_.fwd(fft_out_, fft_in_);
  for (std::size_t j = 0; j < length_; ++j) acc(static_cast<Eigen::Index>(j)) += norm_ * std::norm(fft_out_[j]);
}

void TrajectorySpectrum::add_lag_series(Eigen::Ref<VectorXd> acc, double scale) {
  std::fill(fft_in_.begin(), fft_in_.end(), Complex(0.0, 0.0));
  for (std::size_t m = 0; m <= n_; ++m) {
    const double tau = static_cast<double>(m) * settings_.dt;
    const Complex u = lag_(static_cast<Eigen::Index>(m)) * std::polar(1.0, settings_.e_min * tau / kHbar);
    fft_in_[m % length_] += std::conj(u);
  }
  fft_.fwd(fft_out_, fft_in_);
  for (std::size_t j = 0; j < length_; ++j) acc(static_cast<Eigen::Index>(j)) += scale * fft_out_[j].real();
}

void TrajectorySpectrum::finish_ta_full(Eigen::Ref<VectorXd> acc) {
  const Eigen::Index len_all = static_cast<Eigen::Index>(n_ + 1);
  const double dt = settings_.dt;
  // The mean rotation of C^2 is removed before each root is chosen and restored after.
  VectorXcd turn(len_all);
  VectorXcd half(len_all);
  for (Eigen::Index m = 0; m < len_all; ++m) {
    const double angle = rate_ * static_cast<double>(m) * dt;
    turn(m) = std::polar(1.0, angle);
    half(m) = std::polar(1.0, -0.5 * angle);
  }
  if (ref_.dof() == 1) {
    finish_ta_full_1d(turn, half);
  } else {
    lag_.setZero();
    const std::size_t stride = settings_.t1_stride;
    HkPrefactor prefactor(ref_.widths);
    for (std::size_t j = 0; j <= n_ && status_ == EstimatorStatus::kOk; j += stride) {
      const double outer = (j == 0 || j == n_) ? 0.5 * stride * dt : stride * dt;
      const Complex gj = std::conj(series_(static_cast<Eigen::Index>(j)));
      const MonodromyMatrix inv = monodromy_[j].symplectic_inverse();
      RootTracker root;
      lag_(0) += 0.5 * outer * time_weight(j) * series_(static_cast<Eigen::Index>(j)) * gj;
      for (std::size_t k = j + 1; k <= n_; ++k) {
        const auto m = static_cast<Eigen::Index>(k - j);
        const Complex c = root.next(prefactor(monodromy_[k] * inv).value(), turn(m), half(m));
        lag_(m) += outer * time_weight(k) * c * series_(static_cast<Eigen::Index>(k)) * gj;
      }
      if (!root.ok()) status_ = EstimatorStatus::kPhaseUnresolved;
    }
  }
  if (status_ == EstimatorStatus::kOk) add_lag_series(acc, norm_);
}

// One-DOF double sum written as plain loops so the compiler can vectorize the
// per-pair arithmetic; only the root-sign continuation is sequential.
void TrajectorySpectrum::finish_ta_full_1d(const VectorXcd& turn, const VectorXcd& half) {
  const std::size_t len_all = n_ + 1;
  const std::size_t stride = settings_.t1_stride;
  const double dt = settings_.dt;
  const double g = kHbar * ref_.widths.gamma(0);
  std::vector<double> a0(len_all), a1(len_all), a2(len_all), a3(len_all);
  std::vector<double> gr(len_all), gi(len_all), tr(len_all), ti(len_all), hr(len_all), hi(len_all), wk(len_all, dt);
  for (std::size_t k = 0; k < len_all; ++k) {
    const auto& m = monodromy_[k];
    a0[k] = m.pp()(0, 0);
    a1[k] = m.pq()(0, 0);
    a2[k] = m.qp()(0, 0);
    a3[k] = m.qq()(0, 0);
    const auto kk = static_cast<Eigen::Index>(k);
    gr[k] = series_(kk).real();
    gi[k] = series_(kk).imag();
    tr[k] = turn(kk).real();
    ti[k] = turn(kk).imag();
    hr[k] = half(kk).real();
    hi[k] = half(kk).imag();
  }
  wk.front() = 0.5 * dt;
  wk.back() = 0.5 * dt;
  std::vector<double> lag_re(len_all, 0.0), lag_im(len_all, 0.0);
  std::vector<double> xr(len_all), xi(len_all), md(len_all), dots(len_all), sg(len_all, 1.0);

  for (std::size_t j = 0; j <= n_; j += stride) {
    const std::size_t len = len_all - j;
    const double outer = (j == 0 || j == n_) ? 0.5 * stride * dt : stride * dt;
    const double b0 = a0[j], b1 = a1[j], b2 = a2[j], b3 = a3[j];
    const double* p0 = a0.data() + j;
    const double* p1 = a1.data() + j;
    const double* p2 = a2.data() + j;
    const double* p3 = a3.data() + j;
    for (std::size_t m = 0; m < len; ++m) {
      // Entries of M_k times the symplectic inverse of M_j, (p, q) ordering.
      const double pp = p0[m] * b3 - p1[m] * b2;
      const double pq = p1[m] * b0 - p0[m] * b1;
      const double qp = p2[m] * b3 - p3[m] * b2;
      const double qq = p3[m] * b0 - p2[m] * b1;
      const double cr = 0.5 * (pp + qq);
      const double ci = 0.5 * (pq / g - g * qp);
      // Residual R = C^2 exp(i rate tau) and its principal root.
      const double rr = cr * tr[m] - ci * ti[m];
      const double ri = cr * ti[m] + ci * tr[m];
      const double mod = std::sqrt(rr * rr + ri * ri);
      const double re = std::sqrt(std::max(0.0, 0.5 * (mod + rr)));
      const double im = std::sqrt(std::max(0.0, 0.5 * (mod - rr)));
      xr[m] = re;
      xi[m] = ri < 0.0 ? -im : im;
      md[m] = mod;
    }
    // Sign of each root follows its predecessor; |dot| is sign independent, so the
    // pi/4 turn limit is checked on the principal roots.
    bool bad = false;
    for (std::size_t m = 1; m < len; ++m) {
      const double dot = xr[m] * xr[m - 1] + xi[m] * xi[m - 1];
      bad |= dot * dot < 0.5 * md[m] * md[m - 1];
      dots[m] = dot;
    }
    double sign = 1.0;
    for (std::size_t m = 1; m < len; ++m) {
      if (dots[m] < 0.0) sign = -sign;
      sg[m] = sign;
    }
    if (bad) {
      status_ = EstimatorStatus::kPhaseUnresolved;
      return;
    }
    const double gjr = gr[j], gji = gi[j];
    const double* qr = gr.data() + j;
    const double* qi = gi.data() + j;
    const double* w = wk.data() + j;
    for (std::size_t m = 1; m < len; ++m) {
      // C = root * half, then C g_k conj(g_j).
      const double cr = sg[m] * (xr[m] * hr[m] - xi[m] * hi[m]);
      const double ci = sg[m] * (xr[m] * hi[m] + xi[m] * hr[m]);
      const double ur = cr * qr[m] - ci * qi[m];
      const double ui = cr * qi[m] + ci * qr[m];
      const double wm = outer * w[m];
      lag_re[m] += wm * (ur * gjr + ui * gji);
      lag_im[m] += wm * (ui * gjr - ur * gji);
    }
    // The diagonal enters the two-sided sum once, with C = 1.
    lag_re[0] += 0.5 * outer * w[0] * (gjr * gjr + gji * gji);
  }
  for (std::size_t m = 0; m < len_all; ++m) lag_(static_cast<Eigen::Index>(m)) = Complex(lag_re[m], lag_im[m]);
}

void TrajectorySpectrum::finish_mixed_full(Eigen::Ref<VectorXd> acc) {
  lag_.setZero();
  const std::size_t stride = settings_.t1_stride;
  const double dt = settings_.dt;
  const Eigen::Index n = 2 * settings_.split.tg_count();
  MatrixXd sum(n, n);
  VectorXcd v(n);
  for (std::size_t j = 0; j <= n_; j += stride) {
    const double outer = (j == 0 || j == n_) ? 0.5 * stride * dt : stride * dt;
    const Complex gj = std::conj(series_(static_cast<Eigen::Index>(j)));
    for (std::size_t k = j; k <= n_; ++k) {
      Complex d(1.0, 0.0);
      if (n == 2) {
        const double a = a_[j](0, 0) + a_[k](0, 0);
        const double b = a_[j](0, 1) + a_[k](0, 1);
        const double c = a_[j](1, 1) + a_[k](1, 1);
        const double det = a * c - b * b;
        if (!(a > 0.0) || !(det > 0.0)) {
          status_ = EstimatorStatus::kNotPositiveDefinite;
          return;
        }
        const Complex v0 = b_[j](0) + std::conj(b_[k](0));
        const Complex v1 = b_[j](1) + std::conj(b_[k](1));
        const Complex quad = (c * v0 * v0 - 2.0 * b * v0 * v1 + a * v1 * v1) / det;
        d = std::exp(-0.5 * std::log(det) + 0.25 * quad);
      } else if (n > 0) {
        sum = a_[j] + a_[k];
        llt_.compute(sum);
        if (llt_.info() != Eigen::Success) {
          status_ = EstimatorStatus::kNotPositiveDefinite;
          return;
        }
        const double log_det = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
        v = b_[j] + b_[k].conjugate();
        const VectorXd xr = llt_.solve(v.real());
        const VectorXd xi = llt_.solve(v.imag());
        const Complex quad = v.cwiseProduct(xr.cast<Complex>() + Complex(0.0, 1.0) * xi.cast<Complex>()).sum();
        d = std::exp(-0.5 * log_det + 0.25 * quad);
      }
      const double w = (k == j) ? 0.5 * outer * time_weight(j) : outer * time_weight(k);
      lag_(static_cast<Eigen::Index>(k - j)) += w * gj * series_(static_cast<Eigen::Index>(k)) * std::conj(d);
    }
  }
  add_lag_series(acc, norm_);
}

SpectrumGrid estimate_spectrum(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                               const EstimatorSettings& settings) {
  if (records.empty()) throw std::invalid_argument("estimate_spectrum: no trajectories");
  TrajectorySpectrum est(ref, settings);
  VectorXd acc = VectorXd::Zero(static_cast<Eigen::Index>(settings.n_bins()));
  std::size_t valid = 0;
  for (const auto& rec : records) {
    if (!rec.valid()) continue;
    if (rec.size() != settings.n_steps + 1 || rec.monodromy.size() != rec.size()) {
      throw std::invalid_argument("estimate_spectrum: record length or monodromy series mismatch");
    }
    est.begin(rec.point(0));
    for (std::size_t k = 0; k < rec.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const PhasePoint z = rec.point(k);
      est(TrajectoryStep{k, static_cast<double>(k) * rec.dt, z, rec.action(i), rec.monodromy[k], rec.phase(i),
                         rec.prefactor_log_modulus(i), rec.energy(i)});
    }
    if (est.finish(acc) == EstimatorStatus::kOk) ++valid;
  }
  if (valid == 0) throw NumericalError("estimate_spectrum: no valid trajectories");
  SpectrumGrid out;
  out.e_min = settings.e_min;
  out.e_step = settings.e_step();
  out.intensity = acc / static_cast<double>(valid);
  out.meta.method = std::string(to_string(settings.method));
  out.meta.n_traj = records.size();
  out.meta.n_valid = valid;
  out.meta.padding = settings.padding;
  return out;
}

SpectrumGrid ta_separable(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                          EstimatorSettings settings) {
  settings.method = Method::kTaSeparable;
  return estimate_spectrum(records, ref, settings);
}

SpectrumGrid ta_full(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                     EstimatorSettings settings) {
  settings.method = Method::kTaFull;
  return estimate_spectrum(records, ref, settings);
}

SpectrumGrid mixed_separable(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                             EstimatorSettings settings) {
  settings.method = Method::kMixedSeparable;
  return estimate_spectrum(records, ref, settings);
}

SpectrumGrid mixed_full(const std::vector<TrajectoryRecord>& records, const ReferenceState& ref,
                        EstimatorSettings settings) {
  settings.method = Method::kMixedFull;
  return estimate_spectrum(records, ref, settings);
}

}  // namespace mtasc
