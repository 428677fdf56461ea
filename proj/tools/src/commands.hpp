#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <delaystab/diagnostics.hpp>

#include "config.hpp"

namespace delaystab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,
  kExitUnstable = 2,  // certify: |k| >= k0; verify-bounds: envelope violated
  kExitDiverged = 3,
};

DelaySystem build_model(const ExperimentConfig& config, double k);
Vector initial_state(const ExperimentConfig& config, const DelaySystem& system);
History initial_history(const ExperimentConfig& config, const DelaySystem& system);

/// k-independent inputs of a certificate, either given or estimated.
struct ModelConstants {
  Regime regime = Regime::BoundedLinear;
  SemigroupEstimate semigroup;
  double Bnorm = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  bool estimated = false;
};

/// Explicit values win over estimates; throws ConfigError when something is
/// neither given nor estimable.
ModelConstants resolve_constants(const ExperimentConfig& config);

/// Linear certificate, upgraded to the semilinear one when the model carries a
/// power nonlinearity and the regime is bounded.
StabilityCertificate make_certificate(const ModelConstants& constants, const ExperimentConfig& config,
                                      double k);

struct RunResult {
  double k = 0.0;
  Trajectory trajectory;
  std::optional<StabilityCertificate> certificate;
  std::optional<DecayFit> fit;
  std::optional<BoundReport> bound;
  std::optional<std::size_t> energy_violations;
  double U0_norm = 0.0;
  double alpha = 0.0;
  std::string error;
};

/// Simulates one gain. Certificates and bound reports are attached when
/// constants are available.
RunResult run_single(const ExperimentConfig& config, double k,
                     const std::optional<ModelConstants>& constants);

Json summary_json(const ExperimentConfig& config, const RunResult& result);

int cmd_certify(const ExperimentConfig& config, std::ostream& out);
int cmd_simulate(const ExperimentConfig& config, std::ostream& out);
int cmd_sweep(const ExperimentConfig& config, std::ostream& out);
int cmd_verify_bounds(const ExperimentConfig& config, std::ostream& out);
int cmd_scan_reflection(const ExperimentConfig& config, std::ostream& out);

}  // namespace delaystab::cli
