#include "rcef/energy.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "rcef/config.hpp"

namespace rcef {

void EnergyParams::validate() const {
  for (double v : {sigma, p_c, p_p, a, t_train, m, N, c_c, c_p}) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("energy parameters must be finite and nonnegative");
  }
  if (m < 1.0) throw std::invalid_argument("energy parameters need m >= 1");
}

namespace {

// Extended precision keeps consecutive scaling ratios ordered after rounding to double.
using L = long double;

L central_wh(const EnergyParams& p, L c_c) {
  return (L(p.m) * L(p.N) * L(p.a) + L(p.t_train)) * L(p.p_c) / L(kSecondsPerHour) + c_c * L(p.sigma);
}

L parallel_wh(const EnergyParams& p, L c_p) {
  return (L(p.m) * (L(p.N) * L(p.a) + L(p.t_train)) * L(p.p_p) + L(p.m) * L(p.a) * L(p.p_p)) / L(kSecondsPerHour) +
         c_p * L(p.sigma);
}

}  // namespace

double central_energy(const EnergyParams& p) { return static_cast<double>(central_wh(p, p.c_c)); }

double parallel_energy(const EnergyParams& p) { return static_cast<double>(parallel_wh(p, p.c_p)); }

std::vector<ScalingRow> scaling_curves(const EnergyParams& p, std::span<const double> m_values) {
  if (m_values.empty()) throw std::invalid_argument("scaling_curves needs at least one learner count");
  p.validate();
  std::vector<ScalingRow> rows;
  rows.reserve(m_values.size());
  for (double m : m_values) {
    EnergyParams q = p;
    q.m = m;
    q.c_c = p.c_c * m / p.m;
    q.c_p = p.c_p * m / p.m;
    q.validate();
    const L scale = L(m) / L(p.m);
    const L e_c = central_wh(q, L(p.c_c) * scale), e_p = parallel_wh(q, L(p.c_p) * scale);
    ScalingRow row{m, static_cast<double>(e_c), static_cast<double>(e_p), 0.0};
    row.ratio = e_p > 0.0L ? static_cast<double>(e_c / e_p) : std::numeric_limits<double>::infinity();
    rows.push_back(row);
  }
  return rows;
}

EnergyParams energy_preset(const std::string& name) {
  EnergyParams p;
  p.p_c = 100.0;
  p.p_p = 1.0;
  p.a = 1e-12;
  p.t_train = 1e-10;
  p.m = 16.0;
  p.N = 100.0;
  p.c_c = 6200640.0 / kBytesPerGB;
  p.c_p = 34020.0 / kBytesPerGB;
  if (name == "3g-wh") {
    p.sigma = 0.0029;
  } else if (name == "3g-kwh") {
    p.sigma = 2900.0;
  } else {
    throw std::invalid_argument("unknown energy preset '" + name + "'");
  }
  return p;
}

EnergyParams read_energy_params(std::istream& in) {
  const auto kv = read_key_values(in);
  EnergyParams p;
  if (auto it = kv.find("preset"); it != kv.end()) p = energy_preset(it->second);
  for (const auto& [key, value] : kv) {
    if (key == "preset") continue;
    const double x = parse_double(key, value);
    if (key == "sigma") p.sigma = x;
    else if (key == "p_c") p.p_c = x;
    else if (key == "p_p") p.p_p = x;
    else if (key == "a") p.a = x;
    else if (key == "t_train" || key == "t") p.t_train = x;
    else if (key == "m") p.m = x;
    else if (key == "N") p.N = x;
    else if (key == "c_c") p.c_c = x;
    else if (key == "c_p") p.c_p = x;
    else throw std::invalid_argument("unknown energy parameter '" + key + "'");
  }
  p.validate();
  return p;
}

void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows) {
  out << "m,e_c_wh,e_p_wh,ratio\n";
  for (const auto& r : rows) {
    out << format_double(r.m) << ',' << format_double(r.e_c) << ',' << format_double(r.e_p) << ','
        << format_double(r.ratio) << '\n';
  }
}

}  // namespace rcef
