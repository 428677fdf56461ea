#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace delaystab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Thrown when an argument violates a mathematical precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown for inconsistent solver or experiment configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an operation is asked to handle a regime it does not support
/// (e.g. the Duhamel oracle on a nonlinear system).
class UnsupportedRegime : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Constants of an exponential bound ||e^{tA}|| <= M e^{-omega t}.
struct SemigroupEstimate {
  double M = 1.0;
  double omega = 0.0;
  double margin = 0.01;
};

/// F(u, v) = (0, |u|^beta u), applied nodewise; u occupies the first `nodes`
/// state entries and v the next `nodes`.
struct PowerNonlinearity {
  double beta = 1.0;
  Index nodes = 0;
};

/// Second-order (u, u_t) structure of a wave model: lumped mass weights and
/// the stiffness form, so that ||u_x||^2 (plus boundary terms) = u^T K u.
struct SecondOrderLayout {
  Index nodes = 0;
  Vector mass;
  Matrix stiffness;
};

/// Finite-dimensional realization of U' = A U + F(U) + k * input * output U(t - tau).
///
/// `input_map * output_map` realizes the delay operator. In the bounded case the
/// output map is the operator itself and the input map is the identity; in the
/// factored (boundary / point feedback) case they are the discrete C and C*.
/// The state norm is sqrt(U^T gram U); the delayed-output norm uses
/// `output_weights` as a diagonal inner product.
struct DelaySystem {
  Matrix A;
  Matrix input_map;
  Matrix output_map;
  double tau = 0.0;
  double k = 0.0;
  Matrix gram;
  Vector output_weights;
  std::optional<PowerNonlinearity> nonlinearity;
  std::optional<SecondOrderLayout> layout;
  std::map<std::string, std::string> labels;

  Index dim() const { return A.rows(); }
  Index channels() const { return output_map.rows(); }
  bool linear() const { return !nonlinearity.has_value(); }

  double norm(const Vector& state) const;
  double output_norm(const Vector& output) const;
  Vector output(const Vector& state) const { return output_map * state; }
  Vector nonlinear_term(const Vector& state) const;
};

/// Empty iff every structural invariant of the system holds.
std::vector<std::string> validate_system(const DelaySystem& system);

/// Delayed-feedback input f on one delay interval, sampled uniformly.
/// Sample j is the feedback input seen at t = j * tau / m, i.e. the delayed
/// output at past time -tau + j * tau / m.
class History {
 public:
  History(double tau, std::vector<Vector> samples);

  static History constant(double tau, int subintervals, const Vector& value);

  /// Samples f(s) at s = j * tau / m for j = 0..m.
  template <class Fn>
  static History from_function(double tau, int subintervals, Fn&& fn) {
    if (subintervals < 1) throw DomainError("history needs at least one subinterval");
    std::vector<Vector> samples;
    samples.reserve(static_cast<std::size_t>(subintervals) + 1);
    const double spacing = tau / subintervals;
    for (int j = 0; j <= subintervals; ++j) samples.push_back(fn(j * spacing));
    return History(tau, std::move(samples));
  }

  double tau() const { return tau_; }
  int subintervals() const { return static_cast<int>(samples_.size()) - 1; }
  double spacing() const { return tau_ / subintervals(); }
  double time(int j) const { return -tau_ + j * spacing(); }
  Index channels() const { return samples_.front().size(); }
  const Vector& sample(int j) const { return samples_[static_cast<std::size_t>(j)]; }
  const std::vector<Vector>& samples() const { return samples_; }

 private:
  double tau_;
  std::vector<Vector> samples_;
};

/// Recorded solution samples on a uniform grid aligned with the delay.
struct Trajectory {
  double tau = 0.0;
  double dt = 0.0;  // spacing between recorded samples
  int steps_per_delay = 0;  // solver steps per delay interval
  int record_every = 1;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> norms;
  std::vector<double> energies;  // empty unless computed
  std::vector<Vector> outputs;   // output_map * state at each recorded time
  bool diverged = false;
  double last_valid_time = 0.0;
  std::map<std::string, std::string> labels;

  std::size_t size() const { return times.size(); }
};

enum class Regime { BoundedLinear, BoundedSemilinear, UnboundedLinear };

std::string to_string(Regime regime);
Regime regime_from_string(const std::string& name);

/// Closed-form stability data for one (system constants, k) pair.
struct StabilityCertificate {
  Regime regime = Regime::BoundedLinear;
  double M = 1.0;
  double omega = 0.0;
  double tau = 0.0;
  double k = 0.0;
  // bounded feedback
  double Bnorm = 0.0;
  // unbounded feedback
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
  double Mprime = 1.0;
  double delta = 0.0;

  double k0 = 0.0;
  double sigma = 0.0;
  double omega_prime = 0.0;
  // semilinear
  double Mtilde = 0.0;
  std::string Mtilde_derivation;
  double gamma = 0.0;
  double gamma_max = 0.0;

  double alpha = 0.0;
  bool stable = false;

  /// Per-delay-interval amplification factor of the iterative bound:
  /// 1 + |k| tau B M e^{omega tau} (bounded) or 1 + delta C4 M' (unbounded).
  double growth_factor() const;
};

struct BoundSample {
  double t = 0.0;
  double measured = 0.0;
  double envelope = 0.0;
  double slack = 0.0;  // (envelope - measured) / envelope
};

struct BoundReport {
  std::vector<BoundSample> samples;
  double worst_slack = 0.0;
  bool violated = false;
  double tolerance = 0.0;
  SemigroupEstimate constants;
};

}  // namespace delaystab
