#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rcef {

/// Inputs of the energy estimate. Times in seconds, powers in watts,
/// communication in GB, sigma in Wh per GB.
struct EnergyParams {
  double sigma = 0.0;
  double p_c = 0.0;
  double p_p = 0.0;
  double a = 0.0;        // aggregation time per data point
  double t_train = 0.0;  // model training time
  double m = 1.0;        // learners
  double N = 0.0;        // data points per learner
  double c_c = 0.0;      // central communication
  double c_p = 0.0;      // parallel communication

  void validate() const;
};

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kBytesPerGB = 1e9;

/// (m N a + t) p_c + c_c sigma, with the watt-seconds term converted to Wh.
double central_energy(const EnergyParams& p);

/// m (N a + t) p_p + m a p_p + c_p sigma, same units as central_energy.
double parallel_energy(const EnergyParams& p);

struct ScalingRow {
  double m = 0.0;
  double e_c = 0.0;
  double e_p = 0.0;
  double ratio = 0.0;
};

/// Evaluates both energies for each learner count. Communication volumes
/// scale linearly with m relative to p.m, so c_c / c_p stays fixed.
std::vector<ScalingRow> scaling_curves(const EnergyParams& p, std::span<const double> m_values);

/// Named parameter sets: "3g-wh" (sigma = 0.0029 Wh/GB) and "3g-kwh"
/// (sigma = 2900 Wh/GB), both with the SUSY communication volumes.
EnergyParams energy_preset(const std::string& name);

/// Flat `key = value` file with keys sigma, p_c, p_p, a, t_train, m, N, c_c, c_p.
/// An optional `preset = name` line seeds the remaining keys.
EnergyParams read_energy_params(std::istream& in);

void write_scaling_csv(std::ostream& out, std::span<const ScalingRow> rows);

}  // namespace rcef
