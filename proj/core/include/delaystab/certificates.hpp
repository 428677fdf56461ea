#pragma once

#include <vector>

#include "delaystab/types.hpp"

namespace delaystab {

/// Prefactor and exponent of an explicit decay envelope C e^{rate t}(...).
struct EnvelopeParams {
  double C = 0.0;
  double rate = 0.0;  // sigma - omega, negative when stable
  double U0_norm = 0.0;
  double alpha = 0.0;
};

/// Smallness threshold and decay penalty for a bounded delay operator.
///
/// k0 = (e^{tau omega} - 1) / (tau |B| M e^{tau omega}),
/// sigma = ln(1 + |k| tau |B| M e^{omega tau}) / tau, omega' = omega - sigma.
/// Stability requires the strict inequality |k| < k0.
StabilityCertificate bounded_certificate(double M, double omega, double tau, double Bnorm,
                                         double k);

/// Threshold for a factored delay operator C C* satisfying the admissibility
/// bounds with constants C1 (input map), C2 (output of free motion), C3
/// (output of the input map).
StabilityCertificate unbounded_certificate(double M, double omega, double tau, double C1,
                                           double C2, double C3, double k);

/// alpha = int_0^tau e^{omega s} ||f(s)|| ds by the composite trapezoid rule.
/// `output_weights` (optional) defines the diagonal norm on the input space.
double history_weight_alpha(const History& history, double omega,
                            const Vector& output_weights = Vector());

/// Unbounded-regime history weight: the L^2(0, tau) norm of f.
double history_l2_norm(const History& history, const Vector& output_weights = Vector());

EnvelopeParams envelope_params(const StabilityCertificate& cert, double U0_norm, double alpha);

/// Guaranteed bound on ||U(t)||:
///   bounded:   M  (||U0|| + |k| alpha) e^{(sigma - omega) t}
///   unbounded: M' (||U0|| + delta alpha) e^{(sigma - omega) t}
double envelope_bound(double t, const StabilityCertificate& cert, double U0_norm, double alpha);

/// Lipschitz budget omega' / Mtilde left for the nonlinearity (zero when omega' <= 0).
double semilinear_thresholds(const StabilityCertificate& cert, double Mtilde);

/// Turns a bounded-linear certificate into a semilinear one for Lipschitz
/// constant `gamma`; stable additionally requires gamma < gamma_max.
StabilityCertificate semilinear_certificate(const StabilityCertificate& cert, double Mtilde,
                                            double gamma, std::string derivation);

/// Composed majorant M' sqrt(1 + |B|^2 h^2), h^2 = (e^{2 omega' tau} - 1) / (2 omega' tau),
/// for the growth constant of the (U, Z) transport semigroup.
double tilde_M_estimate(double M, double Bnorm, double tau, double omega_prime);

/// h^2 = (1/tau) int_0^tau e^{2 omega' s} ds, evaluated without cancellation.
double transport_h2(double omega_prime, double tau);

struct RecursionRow {
  int ell = 0;
  double K2_recursive = 0.0;
  double K2_closed = 0.0;
  double K1_closed = 0.0;
};

/// K2 by its defining recursion (K2(-1) = alpha) next to the closed form
/// C4 M' (||U0|| + delta alpha)(1 + delta C4 M')^ell, for ell = 0..ell_max.
std::vector<RecursionRow> verify_recursions(const StabilityCertificate& cert, int ell_max,
                                            double U0_norm, double alpha);

}  // namespace delaystab
