#include "mtasc/spectrum.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mtasc {

VectorXd SpectrumGrid::energies() const {
  VectorXd e(intensity.size());
  for (std::size_t k = 0; k < size(); ++k) e(static_cast<Eigen::Index>(k)) = energy(k);
  return e;
}

double energy_step(std::size_t n_steps, double dt, std::size_t padding) {
  if (n_steps == 0 || !(dt > 0.0) || padding == 0) throw std::invalid_argument("energy_step: bad grid");
  return 2.0 * kPi * kHbar / (static_cast<double>(n_steps) * dt * static_cast<double>(padding));
}

double zero_point_shift(const ModelSpec& model) {
  return morse_level(0, model.morse()) + 0.5 * kHbar * model.discretization().omega.sum();
}

SpectrumGrid shift_energies(const SpectrumGrid& spec, double shift) {
  SpectrumGrid out = spec;
  out.e_min -= shift;
  out.meta.shift += shift;
  return out;
}

SpectrumGrid shift_energies(const SpectrumGrid& spec, const ModelSpec& model) {
  return shift_energies(spec, zero_point_shift(model));
}

SpectrumGrid normalize(const SpectrumGrid& spec) {
  if (spec.size() == 0) throw std::invalid_argument("normalize: empty spectrum");
  const double peak = spec.intensity.maxCoeff();
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw std::invalid_argument("normalize: spectrum has no positive intensity");
  }
  SpectrumGrid out = spec;
  out.intensity /= peak;
  return out;
}

SpectrumGrid window(const SpectrumGrid& spec, Interval range) {
  std::size_t first = spec.size();
  std::size_t last = 0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (range.contains(spec.energy(k))) {
      first = std::min(first, k);
      last = k;
    }
  }
  if (first >= spec.size()) throw std::invalid_argument("window: interval does not overlap the grid");
  SpectrumGrid out = spec;
  out.e_min = spec.energy(first);
  out.intensity = spec.intensity.segment(static_cast<Eigen::Index>(first),
                                         static_cast<Eigen::Index>(last - first + 1));
  return out;
}

void write_spectrum_csv(std::ostream& os, const SpectrumGrid& spec) {
  const auto& m = spec.meta;
  os << std::setprecision(17);
  os << "# method,n_traj,n_valid,seed,model_hash\n";
  os << "# " << m.method << ',' << m.n_traj << ',' << m.n_valid << ',' << m.seed << ',' << m.model_hash << '\n';
  os << "# e_min=" << spec.e_min << ",e_step=" << spec.e_step << ",padding=" << m.padding
     << ",shift=" << m.shift << '\n';
  os << "energy_au,intensity\n";
  for (std::size_t k = 0; k < spec.size(); ++k) {
    os << spec.energy(k) << ',' << spec.intensity(static_cast<Eigen::Index>(k)) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("spectrum csv: bad number '" + s + "'");
  return v;
}

template <typename T>
T parse_unsigned(const std::string& s) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("spectrum csv: bad integer '" + s + "'");
  }
  return v;
}

std::string value_of(const std::string& field, const std::string& key) {
  if (field.rfind(key + "=", 0) != 0) throw std::invalid_argument("spectrum csv: expected " + key);
  return field.substr(key.size() + 1);
}

}  // namespace

SpectrumGrid read_spectrum_csv(std::istream& is) {
  std::string line;
  auto next = [&]() {
    if (!std::getline(is, line)) throw std::invalid_argument("spectrum csv: truncated header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next();
  if (line != "# method,n_traj,n_valid,seed,model_hash") throw std::invalid_argument("spectrum csv: bad header");
  next();
  if (line.rfind("# ", 0) != 0) throw std::invalid_argument("spectrum csv: bad metadata line");
  const auto meta = split_csv(line.substr(2));
  if (meta.size() != 5) throw std::invalid_argument("spectrum csv: bad metadata line");
  SpectrumGrid spec;
  spec.meta.method = meta[0];
  spec.meta.n_traj = parse_unsigned<std::size_t>(meta[1]);
  spec.meta.n_valid = parse_unsigned<std::size_t>(meta[2]);
  spec.meta.seed = parse_unsigned<std::uint64_t>(meta[3]);
  spec.meta.model_hash = meta[4];
  next();
  if (line.rfind("# ", 0) != 0) throw std::invalid_argument("spectrum csv: bad axis line");
  const auto axis = split_csv(line.substr(2));
  if (axis.size() != 4) throw std::invalid_argument("spectrum csv: bad axis line");
  spec.e_min = parse_double(value_of(axis[0], "e_min"));
  spec.e_step = parse_double(value_of(axis[1], "e_step"));
  spec.meta.padding = parse_unsigned<std::size_t>(value_of(axis[2], "padding"));
  spec.meta.shift = parse_double(value_of(axis[3], "shift"));
  next();
  if (line != "energy_au,intensity") throw std::invalid_argument("spectrum csv: bad column header");
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split_csv(line);
    if (cols.size() != 2) throw std::invalid_argument("spectrum csv: bad row '" + line + "'");
    values.push_back(parse_double(cols[1]));
  }
  spec.intensity = Eigen::Map<const VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return spec;
}

SpectrumComparison compare_spectra(const SpectrumGrid& a, const SpectrumGrid& b) {
  if (a.size() != b.size() || a.size() == 0) throw std::invalid_argument("compare_spectra: grid size mismatch");
  const double tol = 1e-9 * std::max(std::abs(a.e_step), 1e-300);
  if (std::abs(a.e_step - b.e_step) > tol || std::abs(a.e_min - b.e_min) > 1e-6 * std::abs(a.e_step)) {
    throw std::invalid_argument("compare_spectra: energy axes differ");
  }
  SpectrumComparison c;
  const VectorXd d = (a.intensity - b.intensity).cwiseAbs();
  Eigen::Index worst = 0;
  c.max_abs_diff = d.maxCoeff(&worst);
  c.worst_bin = static_cast<std::size_t>(worst);
  const double scale = std::max(a.intensity.norm(), b.intensity.norm());
  c.relative_l2 = scale > 0.0 ? d.norm() / scale : 0.0;
  return c;
}

}  // namespace mtasc
