#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <delaystab/serialization.hpp>

namespace delaystab::cli {

/// Inclusive uniform grid start, start + step, ..., <= stop.
struct KGrid {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  bool operator==(const KGrid&) const = default;
};

/// Every knob of one experiment. Flags on the command line mirror these keys
/// with '_' spelled '-'.
struct ExperimentConfig {
  // model
  std::string model = "scalar";
  int N = 50;
  double a = 1.0;
  double a_point = 0.5;
  double damping = 1.0;
  std::optional<double> beta;
  std::vector<double> omega1{0.0, 1.0};
  std::vector<double> omega2{0.25, 0.75};
  double lambda = -1.0;
  double b = 1.0;
  std::vector<double> spectrum{-1.0, -2.0, -3.0, -4.0};
  double Bnorm_target = 1.0;
  double viscosity = 1.0;
  double tau = 1.0;

  // gains
  std::vector<double> k;  // empty with no grid means k = 0
  std::optional<KGrid> k_grid;

  // certificate inputs
  std::optional<double> M;
  std::optional<double> omega;
  std::optional<double> Bnorm;
  std::optional<double> C1;
  std::optional<double> C2;
  std::optional<double> C3;
  std::optional<double> gamma;
  bool estimate = false;
  double margin = 0.01;
  int admissibility_grid = 1024;

  // solver
  std::string solver = "method-of-steps";
  double dt = 0.0;  // 0 selects tau / 128
  double horizon = 20.0;
  std::string integrator = "rk4";
  int record_every = 1;
  double blowup_guard = 1e12;
  int n_rho = 400;
  int gauss_points = 4;

  // data
  std::string initial = "random";
  double initial_scale = 1.0;
  std::string history = "zero";
  double history_value = 1.0;
  std::uint64_t seed = 1;

  // analysis
  std::optional<double> fit_t0;
  std::optional<double> fit_t1;
  double tolerance = 1e-9;
  std::vector<double> reflection_a{0.5, 1.0, 2.0};
  double xi_min = -200.0;
  double xi_max = 200.0;
  double xi_step = 1e-3;

  // outputs
  std::string output_csv;
  std::string output_json;
  bool include_states = false;
  int workers = 4;

  bool operator==(const ExperimentConfig&) const = default;
};

Json to_json(const ExperimentConfig& config);

/// Strict: unknown keys and ill-typed values raise ConfigError naming the key.
ExperimentConfig config_from_json(const Json& j);

ExperimentConfig load_config(const std::string& path);

/// Cross-field checks; throws ConfigError naming the offending key.
void validate_config(const ExperimentConfig& config);

/// Explicit k values followed by the grid points, sorted and deduplicated.
std::vector<double> k_values(const ExperimentConfig& config);

/// The configured dt, or tau / 128 when unset.
double effective_dt(const ExperimentConfig& config);

}  // namespace delaystab::cli
