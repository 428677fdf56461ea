#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "delaystab/types.hpp"

namespace delaystab {

/// Uniform grid on (0, 1) with N interior nodes and h = 1 / (N + 1).
struct WaveGrid {
  int N = 0;
  double h = 0.0;
  Vector nodes;    // interior node coordinates
  Vector weights;  // lumped mass weights

  static WaveGrid interior(int N);
};

struct Subinterval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  bool contains(const Subinterval& other) const { return lo <= other.lo && other.hi <= hi; }
};

/// A = Q diag(spectrum) Q^T with a seeded orthogonal Q (so M = 1 and
/// omega = -max(spectrum) in the Euclidean norm); the bounded delay operator
/// is a seeded matrix rescaled to spectral norm `Bnorm_target`.
DelaySystem build_linear_toy(std::span<const double> spectrum, std::uint64_t seed,
                             double Bnorm_target, double k, double tau);

/// Scalar U' = lambda U + k b U(t - tau).
DelaySystem build_scalar(double lambda, double b, double k, double tau);

/// u_tt - u_xx + a chi_{omega1} u_t = |u|^beta u + k chi_{omega2} u_t(t - tau) on (0, 1),
/// homogeneous Dirichlet ends. Linear when `beta` is empty.
DelaySystem build_wave_internal_1d(int N, double a, double k, double tau,
                                   std::optional<double> beta, Subinterval omega1,
                                   Subinterval omega2);

/// Mesh viscosity used by the boundary-feedback models unless overridden: the
/// damping gains eta K with eta = viscosity h^2.
inline constexpr double kDefaultViscosity = 1.0;

/// u_tt = u_xx, u_x(1) = -u_t(1) - a u(1), u_x(0) = k u_t(0, t - tau).
DelaySystem build_wave_boundary_1d(int N, double a, double k, double tau,
                                   double viscosity = kDefaultViscosity);

/// u_tt = u_xx on (0, a) U (a, 1), u(0) = 0, u_x(1) = -u_t(1),
/// [u](a) = 0, [u_x](a) = k u_t(a, t - tau). `a_point` snaps to the nearest node.
DelaySystem build_wave_interface_1d(int N, double a_point, double k, double tau,
                                    double viscosity = kDefaultViscosity);

/// u_tt - u_xx + alpha u_t = 0, u(0) = 0, u_x(1) = k u_t(1, t - tau).
DelaySystem build_wave_damped_boundary_delay_1d(int N, double alpha_damp, double k, double tau,
                                                double viscosity = kDefaultViscosity);

/// Nodewise |u|^beta u.
Vector grad_G(const Vector& u, double beta);

/// (1 / (beta + 2)) sum_i w_i |u_i|^{beta + 2}.
double G_value(const Vector& u, double beta, const Vector& weights);

/// Snapped interface node index and coordinate for the interface model.
struct SnappedPoint {
  int node = 0;
  double x = 0.0;
  double error = 0.0;
};
SnappedPoint snap_to_grid(double a_point, int N);

}  // namespace delaystab
