#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include <span>

#include "delaystab/diagnostics.hpp"
#include "delaystab/types.hpp"

namespace delaystab {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to the same double. Always uses
/// '.' and never depends on the global locale.
std::string format_double(double value);

/// Matrices are {"rows", "cols", "data"} with `data` in row-major order.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const DelaySystem& system);
DelaySystem system_from_json(const Json& j);

Json to_json(const History& history);
History history_from_json(const Json& j);

Json to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const Json& j);

/// One flat record of certificate fields.
Json to_json(const StabilityCertificate& cert);
StabilityCertificate certificate_from_json(const Json& j);

Json to_json(const SemigroupEstimate& estimate);
Json to_json(const BoundReport& report, bool include_samples = false);

Json to_json(const DecayFit& fit);

/// Columns: t, measured, envelope, slack.
void write_bound_report_csv(std::ostream& out, const BoundReport& report);

/// Columns: M_fit, rate_fit, residual, t0, t1, points.
void write_decay_fit_csv(std::ostream& out, std::span<const DecayFit> fits);

/// Columns: t, norm, [energy], [state_0 .. state_{d-1}].
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          bool include_states = false);

}  // namespace delaystab
