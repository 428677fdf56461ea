#include "delaystab/types.hpp"

#include <cmath>
#include <sstream>

namespace delaystab {

double DelaySystem::norm(const Vector& state) const {
  if (gram.size() == 0) return state.norm();
  return std::sqrt(std::max(0.0, state.dot(gram * state)));
}

double DelaySystem::output_norm(const Vector& output) const {
  if (output_weights.size() == 0) return output.norm();
  return std::sqrt(output.cwiseAbs2().dot(output_weights));
}

Vector DelaySystem::nonlinear_term(const Vector& state) const {
  Vector F = Vector::Zero(state.size());
  if (!nonlinearity) return F;
  const Index n = nonlinearity->nodes;
  const double beta = nonlinearity->beta;
  for (Index i = 0; i < n; ++i) {
    const double u = state[i];
    F[n + i] = std::pow(std::abs(u), beta) * u;
  }
  return F;
}

namespace {

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

}  // namespace

std::vector<std::string> validate_system(const DelaySystem& s) {
  std::vector<std::string> out;
  const Index n = s.A.rows();
  if (n < 1) out.emplace_back("dim must be at least 1");
  if (s.A.rows() != s.A.cols()) out.push_back("A must be square, got " + shape(s.A));
  if (!(s.tau > 0.0) || !std::isfinite(s.tau)) out.emplace_back("tau must be positive");
  if (!std::isfinite(s.k)) out.emplace_back("k must be finite");
  if (s.input_map.rows() != n)
    out.push_back("input_map must have dim rows, got " + shape(s.input_map));
  if (s.output_map.cols() != n)
    out.push_back("output_map must have dim columns, got " + shape(s.output_map));
  if (s.input_map.cols() != s.output_map.rows())
    out.push_back("input_map columns must equal output_map rows (" + shape(s.input_map) +
                  " vs " + shape(s.output_map) + ")");
  if (s.gram.size() != 0 && (s.gram.rows() != n || s.gram.cols() != n))
    out.push_back("gram must be dim x dim, got " + shape(s.gram));
  if (s.output_weights.size() != 0) {
    if (s.output_weights.size() != s.output_map.rows())
      out.emplace_back("output_weights length must equal the number of output channels");
    else if ((s.output_weights.array() <= 0.0).any())
      out.emplace_back("output_weights must be positive");
  }
  if (s.nonlinearity) {
    if (!(s.nonlinearity->beta > 0.0)) out.emplace_back("nonlinearity beta must be positive");
    if (2 * s.nonlinearity->nodes > n)
      out.emplace_back("nonlinearity node count exceeds half the state dimension");
  }
  if (s.layout) {
    const Index m = s.layout->nodes;
    if (2 * m != n) out.emplace_back("second-order layout must cover the whole state");
    if (s.layout->mass.size() != m) out.emplace_back("layout mass length must equal nodes");
    if (s.layout->stiffness.rows() != m || s.layout->stiffness.cols() != m)
      out.emplace_back("layout stiffness must be nodes x nodes");
  }
  const auto finite = [](const Matrix& m) { return m.allFinite(); };
  if (!finite(s.A) || !finite(s.input_map) || !finite(s.output_map))
    out.emplace_back("matrices must be finite");
  return out;
}

History::History(double tau, std::vector<Vector> samples) : tau_(tau), samples_(std::move(samples)) {
  if (!(tau_ > 0.0)) throw DomainError("history tau must be positive");
  if (samples_.size() < 2) throw DomainError("history needs m + 1 samples with m >= 1");
  const Index p = samples_.front().size();
  for (const auto& s : samples_)
    if (s.size() != p) throw DomainError("history samples must share one dimension");
}

History History::constant(double tau, int subintervals, const Vector& value) {
  return from_function(tau, subintervals, [&](double) { return value; });
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::BoundedLinear:
      return "bounded-linear";
    case Regime::BoundedSemilinear:
      return "bounded-semilinear";
    case Regime::UnboundedLinear:
      return "unbounded-linear";
  }
  return "unknown";
}

Regime regime_from_string(const std::string& name) {
  if (name == "bounded-linear") return Regime::BoundedLinear;
  if (name == "bounded-semilinear") return Regime::BoundedSemilinear;
  if (name == "unbounded-linear") return Regime::UnboundedLinear;
  throw ConfigError("unknown regime '" + name + "'");
}

double StabilityCertificate::growth_factor() const {
  if (regime == Regime::UnboundedLinear) return 1.0 + delta * C4 * Mprime;
  return 1.0 + std::abs(k) * tau * Bnorm * M * std::exp(omega * tau);
}

}  // namespace delaystab
