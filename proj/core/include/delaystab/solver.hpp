#pragma once

#include <vector>

#include "delaystab/types.hpp"

namespace delaystab {

enum class Integrator { RK4, ImplicitMidpoint };

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

struct SolverConfig {
  double dt = 0.0;        // tau / dt must be a positive integer
  double horizon = 0.0;   // final time T
  Integrator integrator = Integrator::RK4;
  double blowup_guard = 1e12;
  int record_every = 1;
};

/// tau / dt as an integer; throws ConfigError when dt does not divide tau or
/// leaves fewer than four steps per delay interval.
int steps_per_delay(const SolverConfig& config, double tau);

/// Method of steps: on each delay interval the delayed term is a known forcing
/// read from the history (first interval) or from the already computed
/// trajectory, and the inhomogeneous ODE is advanced with the configured
/// one-step method. Grid reads are exact; RK4 / midpoint half-step reads use a
/// cubic interpolant that never straddles a multiple of tau.
Trajectory solve_method_of_steps(const DelaySystem& system, const Vector& U0,
                                 const History& history, const SolverConfig& config);

/// Linear systems only. Interval by interval,
///   U(t) = e^{(t - l tau) A} U(l tau) + k int e^{(t - s) A} C y(s - tau) ds,
/// with dense exponentials and `gauss_points` Gauss-Legendre nodes on every
/// sub-interval of the history grid; the delayed output is evaluated from the
/// piecewise-cubic interpolant of its samples. The output grid is the history
/// grid.
Trajectory duhamel_oracle(const DelaySystem& system, const Vector& U0, const History& history,
                          double horizon, int gauss_points);

/// Initial transport profile Z(0, rho_j) = f((1 - rho_j) tau), rho_j = j / n_rho,
/// j = 0..n_rho (linear interpolation of the history samples).
std::vector<Vector> initial_transport_profile(const History& history, int n_rho);

/// Evolves (U, Z) with Z(t, rho) ~ delayed output at t - tau rho:
/// first-order upwind in rho on n_rho cells, inflow Z(t, 0) = output(U(t)),
/// coupling k * input * Z(t, 1). Returns the U component.
Trajectory solve_transport_augmented(const DelaySystem& system, const Vector& U0,
                                     const History& history, const SolverConfig& config,
                                     int n_rho);

}  // namespace delaystab
