#include "mtasc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <Eigen/QR>

namespace mtasc {

const char* to_string(PeakKind kind) {
  switch (kind) {
    case PeakKind::kUnassigned: return "unassigned";
    case PeakKind::kSystem: return "system";
    case PeakKind::kBathFundamental: return "bath-fundamental";
    case PeakKind::kBathOvertone: return "bath-overtone";
  }
  return "unassigned";
}

const char* to_string(ShiftTrend trend) {
  switch (trend) {
    case ShiftTrend::kBlueshift: return "blueshift";
    case ShiftTrend::kRedshift: return "redshift";
    case ShiftTrend::kMixed: return "mixed";
  }
  return "mixed";
}

const Peak* PeakList::system(std::size_t n) const {
  for (const auto& p : peaks) {
    if (p.kind == PeakKind::kSystem && p.index == n) return &p;
  }
  return nullptr;
}

const Peak* PeakList::bath_fundamental(std::size_t i) const {
  for (const auto& p : peaks) {
    if (p.kind == PeakKind::kBathFundamental && p.index == i) return &p;
  }
  return nullptr;
}

std::size_t PeakList::system_count() const {
  return static_cast<std::size_t>(
      std::count_if(peaks.begin(), peaks.end(), [](const Peak& p) { return p.kind == PeakKind::kSystem; }));
}

PeakList detect_peaks(const SpectrumGrid& spec, const PeakOptions& options) {
  if (spec.size() < 3) throw std::invalid_argument("detect_peaks: spectrum needs at least three bins");
  if (options.min_separation < 0.0) throw std::invalid_argument("detect_peaks: negative separation");
  const VectorXd& y = spec.intensity;
  const double top = y.maxCoeff();
  if (!(top > 0.0)) throw std::invalid_argument("detect_peaks: spectrum has no positive intensity");
  const double floor = options.threshold * top;

  std::vector<Peak> found;
  for (Eigen::Index k = 1; k + 1 < y.size(); ++k) {
    if (!(y(k) > floor && y(k) > y(k - 1) && y(k) >= y(k + 1))) continue;
    // Vertex of the parabola through the three bins around the maximum.
    const double curv = y(k - 1) - 2.0 * y(k) + y(k + 1);
    const double delta = curv < 0.0 ? 0.5 * (y(k - 1) - y(k + 1)) / curv : 0.0;
    Peak p;
    p.energy = spec.energy(static_cast<std::size_t>(k)) + delta * spec.e_step + spec.meta.shift;
    p.height = (y(k) - 0.25 * (y(k - 1) - y(k + 1)) * delta) / top;
    found.push_back(p);
  }
  if (found.empty()) throw std::invalid_argument("detect_peaks: no peak above the threshold");

  // Taller peaks claim their neighbourhood first.
  std::sort(found.begin(), found.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
  PeakList out;
  for (const auto& p : found) {
    const bool clear = std::all_of(out.peaks.begin(), out.peaks.end(), [&](const Peak& q) {
      return std::abs(q.energy - p.energy) >= options.min_separation;
    });
    if (clear) out.peaks.push_back(p);
  }
  std::sort(out.peaks.begin(), out.peaks.end(), [](const Peak& a, const Peak& b) { return a.energy < b.energy; });
  return out;
}

namespace {

// Closest unassigned peak to `target` within `window`; the taller one on a tie.
Peak* closest_free(PeakList& peaks, double target, double window) {
  Peak* best = nullptr;
  for (auto& p : peaks.peaks) {
    if (p.kind != PeakKind::kUnassigned) continue;
    const double d = std::abs(p.energy - target);
    if (d > window) continue;
    if (best == nullptr) {
      best = &p;
      continue;
    }
    const double db = std::abs(best->energy - target);
    if (d < db || (d == db && p.height > best->height)) best = &p;
  }
  return best;
}

}  // namespace

void assign_peaks(PeakList& peaks, const std::vector<double>& ladder, const VectorXd& bath_omega,
                  const AssignmentOptions& options) {
  if (!(options.window > 0.0)) throw std::invalid_argument("assign_peaks: window must be positive");
  for (auto& p : peaks.peaks) p.kind = PeakKind::kUnassigned;
  const std::size_t n_levels = std::min(options.n_levels, ladder.size());
  for (std::size_t n = 0; n < n_levels; ++n) {
    if (Peak* p = closest_free(peaks, ladder[n], options.window)) {
      p->kind = PeakKind::kSystem;
      p->index = n;
    }
  }
  const Peak* anchor = peaks.system(options.bath_base_level);
  if (anchor == nullptr || bath_omega.size() == 0) return;
  const double base = anchor->energy;

  // A bath line owns at most half the gap to its neighbours (the base peak included).
  std::vector<double> lines(static_cast<std::size_t>(bath_omega.size()));
  for (std::size_t i = 0; i < lines.size(); ++i) lines[i] = bath_omega(static_cast<Eigen::Index>(i));
  double min_gap = options.window;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const double lower = i == 0 ? lines[0] : lines[i] - lines[i - 1];
    double half = 0.5 * lower;
    if (i + 1 < lines.size()) half = std::min(half, 0.5 * (lines[i + 1] - lines[i]));
    half = std::min(half, options.window);
    min_gap = std::min(min_gap, half);
    if (Peak* p = closest_free(peaks, base + lines[i], half)) {
      p->kind = PeakKind::kBathFundamental;
      p->index = i;
    }
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i; j < lines.size(); ++j) {
      if (Peak* p = closest_free(peaks, base + lines[i] + lines[j], min_gap)) p->kind = PeakKind::kBathOvertone;
    }
  }
}

std::vector<double> uncoupled_ladder(const ModelSpec& model, std::size_t n_levels, CounterTermForm form) {
  std::vector<double> levels;
  if (model.counter_term_coefficient() != 0.0) {
    levels = modified_morse_levels(model, n_levels, form);
  } else {
    for (std::size_t n = 0; n < n_levels; ++n) levels.push_back(morse_level(n, model.morse()));
  }
  const double zp = model.bath_zero_point();
  for (auto& e : levels) e += zp;
  return levels;
}

double uncoupled_reference(const ModelSpec& model, std::size_t n) { return uncoupled_ladder(model, n + 1).back(); }

PeakList analyze_peaks(const SpectrumGrid& spec, const ModelSpec& model, std::size_t n_levels) {
  const double w = model.morse().omega_e();
  PeakList peaks = detect_peaks(spec, {1e-5, 0.1 * w});
  assign_peaks(peaks, uncoupled_ladder(model, n_levels), model.discretization().omega, {0.25 * w, n_levels, 1});
  return peaks;
}

double BirgeSponerFit::rms() const {
  return residuals.size() ? std::sqrt(residuals.squaredNorm() / static_cast<double>(residuals.size())) : 0.0;
}

double ParabolaFit::rms() const {
  return residuals.size() ? std::sqrt(residuals.squaredNorm() / static_cast<double>(residuals.size())) : 0.0;
}

std::vector<ShiftRow> shift_table(const PeakList& peaks, const std::vector<double>& ladder) {
  std::vector<ShiftRow> rows;
  for (std::size_t n = 0; n < ladder.size(); ++n) {
    if (const Peak* p = peaks.system(n)) rows.push_back({n, p->energy, ladder[n], p->energy - ladder[n]});
  }
  if (rows.size() < 2) throw std::invalid_argument("shift_table: fewer than two assigned system peaks");
  return rows;
}

BirgeSponerFit birge_sponer(const std::vector<std::pair<std::size_t, double>>& levels, std::size_t max_n) {
  BirgeSponerFit fit;
  std::vector<double> diffs;
  for (std::size_t n = 1; n <= max_n; ++n) {
    auto find = [&](std::size_t k) {
      return std::find_if(levels.begin(), levels.end(), [k](const auto& l) { return l.first == k; });
    };
    const auto hi = find(n);
    const auto lo = find(n - 1);
    if (hi == levels.end() || lo == levels.end()) continue;
    fit.n.push_back(n);
    diffs.push_back(hi->second - lo->second);
  }
  if (fit.n.size() < 2) throw std::invalid_argument("birge_sponer: fewer than two level differences");
  const auto m = static_cast<Eigen::Index>(fit.n.size());
  MatrixXd design(m, 2);
  fit.differences = Eigen::Map<const VectorXd>(diffs.data(), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = static_cast<double>(fit.n[static_cast<std::size_t>(i)]);
  }
  const VectorXd coef = design.colPivHouseholderQr().solve(fit.differences);
  fit.intercept = coef(0);
  fit.slope = coef(1);
  fit.residuals = fit.differences - design * coef;
  return fit;
}

BirgeSponerFit birge_sponer(const PeakList& peaks, std::size_t max_n) {
  std::vector<std::pair<std::size_t, double>> levels;
  for (const auto& p : peaks.peaks) {
    if (p.kind == PeakKind::kSystem) levels.emplace_back(p.index, p.energy);
  }
  return birge_sponer(levels, max_n);
}

ParabolaFit parabola_fit(const std::vector<ShiftRow>& rows) {
  if (rows.size() < 3) throw std::invalid_argument("parabola_fit: fewer than three points");
  const auto m = static_cast<Eigen::Index>(rows.size());
  MatrixXd design(m, 3);
  VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = static_cast<double>(rows[static_cast<std::size_t>(i)].n) + 0.5;
    design.row(i) << 1.0, x, x * x;
    y(i) = rows[static_cast<std::size_t>(i)].e_plot;
  }
  const auto qr = design.colPivHouseholderQr();
  if (qr.rank() < 3) throw std::invalid_argument("parabola_fit: degenerate abscissae");
  const VectorXd coef = qr.solve(y);
  ParabolaFit fit;
  fit.c0 = coef(0);
  fit.c1 = coef(1);
  fit.c2 = coef(2);
  fit.residuals = y - design * coef;
  return fit;
}

ShiftTrend classify_trend(const std::vector<ShiftRow>& rows) {
  bool up = true;
  bool down = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    up = up && rows[i].e_plot > rows[i - 1].e_plot;
    down = down && rows[i].e_plot < rows[i - 1].e_plot;
  }
  if (rows.size() < 2) return ShiftTrend::kMixed;
  return up ? ShiftTrend::kBlueshift : down ? ShiftTrend::kRedshift : ShiftTrend::kMixed;
}

ShiftAnalysis analyze_shifts(const PeakList& peaks, const std::vector<double>& ladder, std::size_t max_n) {
  ShiftAnalysis out;
  out.rows = shift_table(peaks, ladder);
  out.trend = classify_trend(out.rows);
  try {
    out.birge_sponer = birge_sponer(peaks, max_n);
  } catch (const std::invalid_argument&) {
  }
  std::vector<ShiftRow> fit_rows;
  for (const auto& r : out.rows) {
    if (r.n <= max_n) fit_rows.push_back(r);
  }
  if (fit_rows.size() >= 3) out.parabola = parabola_fit(fit_rows);
  return out;
}

ReferenceConstants gas_phase_constants(const MorseParams& morse) {
  return {"gas_phase", morse.omega_e(), morse.omega_e_x_e()};
}

ReferenceConstants matching_constants(const ModelSpec& model, std::size_t max_n, CounterTermForm form) {
  if (model.counter_term_coefficient() == 0.0) return gas_phase_constants(model.morse());
  const auto levels = modified_morse_levels(model, max_n + 1, form);
  std::vector<std::pair<std::size_t, double>> indexed;
  for (std::size_t n = 0; n < levels.size(); ++n) indexed.emplace_back(n, levels[n]);
  const BirgeSponerFit fit = birge_sponer(indexed, max_n);
  return {"counter_term_reference", fit.omega_e(), fit.omega_e_x_e()};
}

void write_analysis_csv(std::ostream& os, const ShiftAnalysis& analysis, const PeakList& peaks,
                        const std::vector<ReferenceConstants>& references) {
  os << std::setprecision(17);
  os << "n,E_coup_au,E_ref_au,E_plot_au\n";
  for (const auto& r : analysis.rows) os << r.n << ',' << r.e_coup << ',' << r.e_ref << ',' << r.e_plot << '\n';
  os << "# trend=" << to_string(analysis.trend) << '\n';
  os << "# fits are unweighted least squares; Birge-Sponer abscissa is n of E_n - E_(n-1)\n";
  if (const auto& bs = analysis.birge_sponer) {
    os << "# birge_sponer,omega_e=" << bs->omega_e() << ",omega_e_x_e=" << bs->omega_e_x_e()
       << ",intercept=" << bs->intercept << ",slope=" << bs->slope << ",rms=" << bs->rms() << '\n';
    for (const auto& ref : references) {
      os << "# reference," << ref.label << ",omega_e=" << ref.omega_e << ",omega_e_x_e=" << ref.omega_e_x_e
         << ",d_omega_e=" << bs->omega_e() - ref.omega_e
         << ",d_omega_e_x_e=" << bs->omega_e_x_e() - ref.omega_e_x_e << '\n';
    }
  }
  if (const auto& pf = analysis.parabola) {
    os << "# parabola,c0=" << pf->c0 << ",c1=" << pf->c1 << ",c2=" << pf->c2
       << ",d_omega_e=" << pf->delta_omega_e() << ",d_omega_e_x_e=" << pf->delta_omega_e_x_e()
       << ",bath_offset=" << pf->bath_offset() << ",rms=" << pf->rms() << '\n';
  }
  for (const auto& p : peaks.peaks) {
    os << "# peak,energy_au=" << p.energy << ",height=" << p.height << ",kind=" << to_string(p.kind);
    if (p.kind == PeakKind::kSystem || p.kind == PeakKind::kBathFundamental) os << ",index=" << p.index;
    os << '\n';
  }
}

void write_plot_script(std::ostream& os, const std::string& spectrum_csv, const std::string& analysis_csv,
                       const ShiftAnalysis& analysis) {
  os << std::setprecision(17);
  os << "set datafile separator ','\n"
     << "set datafile commentschars '#'\n"
     << "set terminal pngcairo size 1200,900\n"
     << "set output 'plots.png'\n"
     << "set multiplot layout 3,1\n"
     << "set xlabel 'E (hartree)'\nset ylabel 'intensity'\nset logscale y\n"
     << "plot '" << spectrum_csv << "' every ::1 using 1:2 with lines title 'spectrum'\n"
     << "unset logscale y\n"
     << "set xlabel 'n'\nset ylabel 'E_plot (hartree)'\n"
     << "plot '" << analysis_csv << "' every ::1 using 1:4 with linespoints title 'shift'\n"
     << "set ylabel 'E_n - E_(n-1) (hartree)'\n";
  if (const auto& bs = analysis.birge_sponer) {
    os << "$bs << EOD\n";
    for (std::size_t i = 0; i < bs->n.size(); ++i) {
      os << bs->n[i] << ',' << bs->differences(static_cast<Eigen::Index>(i)) << '\n';
    }
    os << "EOD\n"
       << "plot $bs using 1:2 with points title 'differences', " << bs->intercept << " + " << bs->slope
       << "*x title 'Birge-Sponer fit'\n";
  }
  os << "unset multiplot\n";
}

}  // namespace mtasc
