#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "contmeas/core.hpp"

namespace contmeas {

struct PotentialConfig {
  std::string kind = "harmonic";  ///< free | harmonic | linear | polynomial
  double omega0 = 1.0;
  double v0 = 0.0;
  double v1 = 0.0;
  std::vector<double> coefficients;  ///< polynomial: sum_k c_k q^k

  Potential build(double mass) const;
};

struct GridConfig {
  double q_min = -20.0;
  double q_max = 20.0;
  std::size_t n = 256;

  Grid build() const { return Grid(q_min, q_max, n); }
};

/// Everything a scenario needs. Unused fields are ignored by a scenario but
/// still hashed, so two configs differing anywhere get different run ids.
struct ExperimentConfig {
  std::string scenario;
  PhysicalParams params;
  PotentialConfig potential;
  GridConfig grid;

  double dt = 1e-3;
  std::size_t n_steps = 1000;
  std::size_t record_every = 10;
  std::size_t ensemble = 100;
  std::uint64_t seed = 1;
  std::string output_dir = "runs";
  bool strict = false;
  bool dissipationless = false;
  bool wigner_dumps = false;

  // Initial state: a coherent state at (p0, q0) unless init_var_q > 0, which
  // selects a real Gaussian wavepacket (quantum) or phase-space Gaussian
  // (classical) with that position variance and init_var_p.
  double p0 = 0.0;
  double q0 = 0.0;
  double init_var_q = 0.0;
  double init_var_p = 0.0;

  // Cat scenario.
  double p1 = 0.0, q1 = 2.0, p2 = 0.0, q2 = -2.0;
  std::vector<double> times = {1.0, 2.0, 4.0};
  std::vector<double> hbar_scan = {1.0, 0.5, 0.25, 0.125};

  // Meter scenario.
  std::string meter_mode = "pointer";  ///< sample | noise | pointer
  std::size_t bath_modes = 4096;
  double omega_min = 0.05;
  double band_lo = 0.95;
  double filter_rate = 10.0;  ///< lambda
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical serialization; the config hash is fnv1a of this string.
std::string canonical_json(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);

/// Time series with optional standard errors (empty se means exact).
struct Series {
  std::string name;
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> se;
};

struct Tolerance {
  double n_sigma = 3.0;  ///< allowed multiple of the combined standard error
  double absolute = 0.0;  ///< added to the band
  double relative = 1e-12;  ///< round-off floor, times the larger magnitude
};

struct ObservableComparison {
  std::string name;
  double max_abs_deviation = 0.0;
  double max_z = 0.0;  ///< largest deviation in units of the combined standard error
  std::size_t n_points = 0;
  std::string tolerance;  ///< human-readable band, e.g. "3 sigma + 0"
  bool pass = true;
};

struct ComparisonReport {
  std::vector<ObservableComparison> rows;
  bool pass() const;
  nlohmann::json to_json() const;
};

/// Pairs series by name and compares them point by point. Throws DomainError
/// if a name is missing or the time axes differ (resample onto a common axis).
ComparisonReport compare(const std::vector<Series>& a, const std::vector<Series>& b,
                         const Tolerance& tol = {});

struct ScenarioResult {
  std::filesystem::path run_dir;
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  std::optional<ComparisonReport> comparison;
  /// False when a comparison made by the scenario failed its tolerance.
  bool pass = true;
};

/// Runs cfg.scenario into <output_dir>/<scenario>-<hash> and writes a
/// manifest.json listing every artifact with its hash. Throws DomainError for
/// unknown scenarios and, with cfg.strict, for regime warnings.
ScenarioResult run_scenario(const ExperimentConfig& cfg);

}  // namespace contmeas
