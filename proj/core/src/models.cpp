#include "delaystab/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "delaystab/linalg.hpp"

namespace delaystab {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt(const Subinterval& s) { return "[" + fmt(s.lo) + "," + fmt(s.hi) + "]"; }

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

/// Lumped-mass chain on `n` consecutive nodes with spacing h. Edge terms
/// (u_{i+1} - u_i)^2 / h; `dirichlet_left` / `dirichlet_right` add the edge to
/// a clamped neighbour.
Matrix chain_stiffness(Index n, double h, bool dirichlet_left, bool dirichlet_right) {
  Matrix K = Matrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    K(i, i) += 1.0 / h;
    K(i + 1, i + 1) += 1.0 / h;
    K(i, i + 1) -= 1.0 / h;
    K(i + 1, i) -= 1.0 / h;
  }
  if (dirichlet_left) K(0, 0) += 1.0 / h;
  if (dirichlet_right) K(n - 1, n - 1) += 1.0 / h;
  return K;
}

/// First-order form of  W v' = -K u - D v  on U = (u, v).
DelaySystem second_order_system(const Vector& mass, const Matrix& K, const Matrix& damping) {
  const Index n = mass.size();
  DelaySystem s;
  s.A = Matrix::Zero(2 * n, 2 * n);
  s.A.topRightCorner(n, n) = Matrix::Identity(n, n);
  const Vector inv_mass = mass.cwiseInverse();
  s.A.bottomLeftCorner(n, n) = -(inv_mass.asDiagonal() * K);
  s.A.bottomRightCorner(n, n) = -(inv_mass.asDiagonal() * damping);
  s.gram = Matrix::Zero(2 * n, 2 * n);
  s.gram.topLeftCorner(n, n) = K;
  s.gram.bottomRightCorner(n, n) = Matrix(mass.asDiagonal());
  s.layout = SecondOrderLayout{n, mass, K};
  return s;
}

/// Rank-one point feedback into the v-equation of `node` with coefficient
/// `sign / mass(node)`, observing v(node).
void point_feedback(DelaySystem& s, Index node, double sign) {
  const Index n = s.layout->nodes;
  s.input_map = Matrix::Zero(2 * n, 1);
  s.input_map(n + node, 0) = sign / s.layout->mass[node];
  s.output_map = Matrix::Zero(1, 2 * n);
  s.output_map(0, n + node) = 1.0;
  s.output_weights = Vector::Ones(1);
}

/// Boundary damping plus the mesh viscosity eta K (eta = viscosity h^2), which
/// damps the spurious high-frequency modes of the discrete wave uniformly in h.
Matrix with_viscosity(const Vector& damping, const Matrix& K, double viscosity, double h) {
  require(viscosity >= 0.0, "viscosity must be nonnegative");
  return Matrix(damping.asDiagonal()) + viscosity * h * h * K;
}

}  // namespace

WaveGrid WaveGrid::interior(int N) {
  require(N >= 3, "wave grid needs N >= 3");
  WaveGrid g;
  g.N = N;
  g.h = 1.0 / (N + 1);
  g.nodes.resize(N);
  for (int i = 0; i < N; ++i) g.nodes[i] = (i + 1) * g.h;
  g.weights = Vector::Constant(N, g.h);
  return g;
}

DelaySystem build_linear_toy(std::span<const double> spectrum, std::uint64_t seed,
                             double Bnorm_target, double k, double tau) {
  require(!spectrum.empty(), "spectrum must be nonempty");
  for (double lambda : spectrum) require(lambda < 0.0, "spectrum entries must be negative");
  require(Bnorm_target > 0.0, "Bnorm_target must be positive");
  const auto n = static_cast<Index>(spectrum.size());

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) G(i, j) = normal(rng);
  const Matrix Q = Eigen::HouseholderQR<Matrix>(G).householderQ();
  Matrix B(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) B(i, j) = normal(rng);
  B *= Bnorm_target / linalg::spectral_norm(B);

  Vector diag(n);
  for (Index i = 0; i < n; ++i) diag[i] = spectrum[static_cast<std::size_t>(i)];

  DelaySystem s;
  s.A = Q * diag.asDiagonal() * Q.transpose();
  s.A = 0.5 * (s.A + s.A.transpose());
  s.input_map = Matrix::Identity(n, n);
  s.output_map = B;
  s.tau = tau;
  s.k = k;
  s.labels = {{"model", "linear-toy"},
              {"regime", "bounded"},
              {"dim", std::to_string(n)},
              {"seed", std::to_string(seed)},
              {"Bnorm", fmt(Bnorm_target)}};
  return s;
}

DelaySystem build_scalar(double lambda, double b, double k, double tau) {
  require(b != 0.0, "scalar delay coefficient must be nonzero");
  DelaySystem s;
  s.A = Matrix::Constant(1, 1, lambda);
  s.input_map = Matrix::Identity(1, 1);
  s.output_map = Matrix::Constant(1, 1, b);
  s.tau = tau;
  s.k = k;
  s.labels = {{"model", "scalar"}, {"regime", "bounded"}, {"lambda", fmt(lambda)}, {"b", fmt(b)}};
  return s;
}

DelaySystem build_wave_internal_1d(int N, double a, double k, double tau,
                                   std::optional<double> beta, Subinterval omega1,
                                   Subinterval omega2) {
  require(omega1.lo >= 0.0 && omega1.hi <= 1.0 && omega1.lo < omega1.hi,
          "omega1 must be a subinterval of (0,1)");
  require(omega2.lo >= 0.0 && omega2.hi <= 1.0 && omega2.lo < omega2.hi,
          "omega2 must be a subinterval of (0,1)");
  require(omega1.contains(omega2), "omega2 must be contained in omega1");
  require(a > std::abs(k), "damping gain a must exceed |k|");
  if (beta) require(*beta > 0.0, "beta must be positive");

  const WaveGrid grid = WaveGrid::interior(N);
  const Index n = N;
  Vector damping = Vector::Zero(n);
  std::vector<Index> delayed_nodes;
  for (Index i = 0; i < n; ++i) {
    if (omega1.contains(grid.nodes[i])) damping[i] = a * grid.weights[i];
    if (omega2.contains(grid.nodes[i])) delayed_nodes.push_back(i);
  }
  require(!delayed_nodes.empty(), "omega2 contains no grid node");

  DelaySystem s = second_order_system(grid.weights, chain_stiffness(n, grid.h, true, true),
                                      Matrix(damping.asDiagonal()));
  const auto p = static_cast<Index>(delayed_nodes.size());
  s.input_map = Matrix::Zero(2 * n, p);
  s.output_map = Matrix::Zero(p, 2 * n);
  s.output_weights.resize(p);
  for (Index c = 0; c < p; ++c) {
    const Index node = delayed_nodes[static_cast<std::size_t>(c)];
    s.input_map(n + node, c) = 1.0;
    s.output_map(c, n + node) = 1.0;
    s.output_weights[c] = grid.weights[node];
  }
  s.tau = tau;
  s.k = k;
  if (beta) s.nonlinearity = PowerNonlinearity{*beta, n};
  s.labels = {{"model", "wave-internal-1d"},
              {"regime", "bounded"},
              {"N", std::to_string(N)},
              {"h", fmt(grid.h)},
              {"a", fmt(a)},
              {"omega1", fmt(omega1)},
              {"omega2", fmt(omega2)},
              {"beta", beta ? fmt(*beta) : std::string("none")},
              {"note", "1D reduction of the n>=3 internal-damping example"}};
  return s;
}

DelaySystem build_wave_boundary_1d(int N, double a, double k, double tau, double viscosity) {
  require(a > 0.0, "boundary stiffness a must be positive");
  require(N >= 3, "need N >= 3");
  const double h = 1.0 / (N + 1);
  const Index n = N + 2;  // nodes 0..N+1 including both endpoints
  Vector mass = Vector::Constant(n, h);
  mass[0] = mass[n - 1] = 0.5 * h;
  Matrix K = chain_stiffness(n, h, false, false);
  K(n - 1, n - 1) += a;
  Vector damping = Vector::Zero(n);
  damping[n - 1] = 1.0;

  DelaySystem s = second_order_system(mass, K, with_viscosity(damping, K, viscosity, h));
  // u_x(0) = k u_t(0, t - tau) enters node 0 as -u_x(0).
  point_feedback(s, 0, -1.0);
  s.tau = tau;
  s.k = k;
  s.labels = {{"model", "wave-boundary-1d"}, {"regime", "unbounded"}, {"N", std::to_string(N)},
              {"h", fmt(h)}, {"a", fmt(a)}, {"viscosity", fmt(viscosity)}};
  return s;
}

SnappedPoint snap_to_grid(double a_point, int N) {
  require(a_point > 0.0 && a_point < 1.0, "interface point must lie in (0,1)");
  const double h = 1.0 / (N + 1);
  int node = static_cast<int>(std::lround(a_point / h));
  node = std::clamp(node, 1, N);
  SnappedPoint p;
  p.node = node;
  p.x = static_cast<double>(node) / (N + 1);
  p.error = std::abs(p.x - a_point);
  return p;
}

DelaySystem build_wave_interface_1d(int N, double a_point, double k, double tau,
                                    double viscosity) {
  require(N >= 3, "need N >= 3");
  const SnappedPoint snap = snap_to_grid(a_point, N);
  const double h = 1.0 / (N + 1);
  const Index n = N + 1;  // nodes 1..N+1, u(0) = 0 eliminated
  Vector mass = Vector::Constant(n, h);
  mass[n - 1] = 0.5 * h;
  Vector damping = Vector::Zero(n);
  damping[n - 1] = 1.0;

  const Matrix K = chain_stiffness(n, h, true, false);
  DelaySystem s = second_order_system(mass, K, with_viscosity(damping, K, viscosity, h));
  // Flux balance at the interface: w v' = -(K u) - [u_x](a).
  point_feedback(s, snap.node - 1, -1.0);
  s.tau = tau;
  s.k = k;
  s.labels = {{"model", "wave-interface-1d"}, {"regime", "unbounded"},
              {"N", std::to_string(N)},      {"h", fmt(h)},
              {"a_point", fmt(a_point)},     {"snapped_a", fmt(snap.x)},
              {"snap_error", fmt(snap.error)}, {"viscosity", fmt(viscosity)}};
  return s;
}

DelaySystem build_wave_damped_boundary_delay_1d(int N, double alpha_damp, double k, double tau,
                                                double viscosity) {
  require(alpha_damp > 0.0, "interior damping must be positive");
  require(N >= 3, "need N >= 3");
  const double h = 1.0 / (N + 1);
  const Index n = N + 1;
  Vector mass = Vector::Constant(n, h);
  mass[n - 1] = 0.5 * h;
  const Vector damping = alpha_damp * mass;

  const Matrix K = chain_stiffness(n, h, true, false);
  DelaySystem s = second_order_system(mass, K, with_viscosity(damping, K, viscosity, h));
  // u_x(1) = k u_t(1, t - tau) enters the last node as +u_x(1).
  point_feedback(s, n - 1, 1.0);
  s.tau = tau;
  s.k = k;
  s.labels = {{"model", "wave-damped-boundary-1d"}, {"regime", "unbounded"},
              {"N", std::to_string(N)}, {"h", fmt(h)}, {"alpha", fmt(alpha_damp)},
              {"viscosity", fmt(viscosity)}};
  return s;
}

Vector grad_G(const Vector& u, double beta) {
  return u.unaryExpr([beta](double x) { return std::pow(std::abs(x), beta) * x; });
}

double G_value(const Vector& u, double beta, const Vector& weights) {
  double sum = 0.0;
  for (Index i = 0; i < u.size(); ++i) sum += weights[i] * std::pow(std::abs(u[i]), beta + 2.0);
  return sum / (beta + 2.0);
}

}  // namespace delaystab
