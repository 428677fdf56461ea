#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "delaystab/types.hpp"

namespace delaystab {

// ---------------------------------------------------------------------------
// Energy

/// Delayed-output samples covering [t - tau, t] on a uniform grid of spacing
/// dt. Each piece is integrated separately by the trapezoid rule; the split
/// marks the seam between stored history and computed trajectory.
struct TrailingWindow {
  double dt = 0.0;
  std::vector<std::vector<Vector>> pieces;
};

/// E = 1/2 |u_t|^2 + 1/2 u^T K u - G(u) + 1/2 |k| int_{t - tau}^t |B* u_t(s)|^2 ds.
double energy(const DelaySystem& system, const Vector& state, const TrailingWindow& window);

/// Energy at every sample of a trajectory recorded at solver resolution.
std::vector<double> energy_series(const DelaySystem& system, const Trajectory& trajectory,
                                  const History& history);

/// Indices n with E[n + 1] > E[n] + tol.
std::vector<std::size_t> energy_monotone_check(std::span<const double> energies, double tol);

// ---------------------------------------------------------------------------
// Semigroup constants

/// Log-spaced times in [t_max * 1e-4, t_max]; `shift` in [0, 1) offsets the
/// grid by a fraction of one log step (for out-of-sample checks).
std::vector<double> log_time_grid(double t_max, int samples, double shift = 0.0);

/// max over `times` of ||e^{tA}||_W e^{omega t} in the norm induced by `gram`
/// (Euclidean when empty).
double sampled_growth(const Matrix& A, const Matrix& gram, double omega,
                      std::span<const double> times);

/// omega = (1 - margin)(-spectral abscissa), M = max(1, sampled growth).
/// Throws DomainError when the spectral abscissa is not negative.
SemigroupEstimate estimate_semigroup_constants(const Matrix& A, double t_max, int samples,
                                               double margin = 0.01,
                                               const Matrix& gram = Matrix());

/// Default horizon for the sampled supremum: long enough for the conceded
/// margin to dominate polynomial transients.
double default_semigroup_horizon(double omega, double margin);

/// Norm of the bounded delay operator input_map * output_map in the model norm.
double delay_operator_norm(const DelaySystem& system);

// ---------------------------------------------------------------------------
// Contrast and admissibility constants

/// Smallest mu with |Bstar u|^2 <= mu |Cstar u|^2; +infinity when Bstar does
/// not vanish on the null space of Cstar.
double estimate_mu(const Matrix& Bstar, const Matrix& Cstar);

struct AdmissibilityEstimate {
  double C1 = 0.0;  // input-to-state map at t = tau
  double C2 = 0.0;  // free motion to output on (0, tau)
  double C3 = 0.0;  // input to output on (0, tau)
  int grid = 0;
  double tau = 0.0;
  std::string mesh;
};

/// Discrete admissibility constants on an (m + 1)-point trapezoid grid of
/// [0, tau], each the largest singular value of the corresponding map in
/// weighted norms.
AdmissibilityEstimate estimate_admissibility(const DelaySystem& system, double tau, int m);

// ---------------------------------------------------------------------------
// Decay fitting and bound verification

enum class FitSignal { Norm, Energy };

struct DecayFit {
  double M_fit = 0.0;
  double rate_fit = 0.0;  // positive = decaying
  double residual = 0.0;  // RMS of log residuals
  double t0 = 0.0;
  double t1 = 0.0;
  int points = 0;
};

/// Least squares on (t, log value) over per-delay-interval maxima in [t0, t1].
DecayFit fit_decay_envelope(std::span<const double> times, std::span<const double> values,
                            double tau, double t0, double t1);

DecayFit fit_decay_rate(const Trajectory& trajectory, double t0, double t1,
                        FitSignal use = FitSignal::Norm);

/// Checks e^{omega t} ||U(t)|| against the per-interval iterative envelope
/// (growth_factor()^n on [0, (n + 1) tau]). Slack is relative to the envelope.
BoundReport verify_iterative_bound(const Trajectory& trajectory, const StabilityCertificate& cert,
                                   double U0_norm, double alpha, double tol,
                                   const SemigroupEstimate& constants);

// ---------------------------------------------------------------------------
// Boundary reflection coefficient

/// c(xi) = a e^{-i xi} / (xi sin xi - (a + i xi) cos xi).
std::complex<double> reflection_coefficient(double xi, double a);

struct ReflectionScan {
  double sup = 0.0;
  double argmax = 0.0;
  double min_denominator = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> table;  // (xi, |c(xi)|) when requested
};

ReflectionScan sup_scan(double a, double xi_min, double xi_max, double step,
                        bool keep_table = false);

// ---------------------------------------------------------------------------
// Small-data radius for the semilinear wave

/// C_psi with |grad G(u)|_W <= C_psi |u|_K^{beta} |u|_K on the given mesh,
/// from the discrete sup-norm and L2 embedding constants.
double psi_constant(const SecondOrderLayout& layout, double beta);

struct SmallnessRadius {
  double rho0 = 0.0;
  double energy_branch = 0.0;  // (1/2) psi^{-1}(1/4)
  double decay_branch = 0.0;   // (1/(2 sqrt 2)) psi^{-1}(omega'/Mtilde)
};

SmallnessRadius smallness_radius(double C_psi, double beta, double omega_prime, double Mtilde);

/// (|u0|_K^2 + |u1|_W^2 + |k| int_0^tau |g|^2)^{1/2}.
double data_size(const DelaySystem& system, const Vector& U0, const History& history);

}  // namespace delaystab
