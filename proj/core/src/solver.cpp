#include "delaystab/solver.hpp"

#include <cmath>
#include <sstream>

#include "delaystab/linalg.hpp"

namespace delaystab {

std::string to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::RK4:
      return "rk4";
    case Integrator::ImplicitMidpoint:
      return "implicit-midpoint";
  }
  return "unknown";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "rk4") return Integrator::RK4;
  if (name == "implicit-midpoint") return Integrator::ImplicitMidpoint;
  throw ConfigError("unknown integrator '" + name + "'");
}

int steps_per_delay(const SolverConfig& config, double tau) {
  if (!(config.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  const double ratio = tau / config.dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
    std::ostringstream os;
    os << "dt = " << config.dt << " does not divide tau = " << tau;
    throw ConfigError(os.str());
  }
  if (rounded < 4.0) throw ConfigError("need at least 4 steps per delay interval");
  return static_cast<int>(rounded);
}

namespace {

void check_inputs(const DelaySystem& system, const Vector& U0, const History& history) {
  const auto problems = validate_system(system);
  if (!problems.empty()) throw ConfigError("invalid system: " + problems.front());
  if (U0.size() != system.dim()) throw ConfigError("initial state has wrong dimension");
  if (history.channels() != system.channels())
    throw ConfigError("history channels do not match the output map");
  if (std::abs(history.tau() - system.tau) > 1e-12 * system.tau)
    throw ConfigError("history tau differs from system tau");
}

/// Delayed-output samples for the delay segment `seg`: segment 0 is the
/// stored history, segment s >= 1 is the trajectory output on [(s-1) tau, s tau].
class DelayedSignal {
 public:
  DelayedSignal(const History& history, const std::vector<Vector>& outputs, int m)
      : history_(history), outputs_(outputs), m_(m) {
    if (history.subintervals() % m != 0)
      throw ConfigError("history grid must be a refinement of the solver grid");
    stride_ = history.subintervals() / m;
  }

  const Vector& sample(int seg, int i) const {
    if (seg == 0) return history_.sample(i * stride_);
    return outputs_[static_cast<std::size_t>((seg - 1) * m_ + i)];
  }

  Vector at(int seg, double x) const {
    const double fl = std::floor(x);
    if (x == fl) return sample(seg, static_cast<int>(fl));
    const auto st = linalg::cubic_stencil(x, m_);
    Vector y = st.weights[0] * sample(seg, st.start);
    for (int a = 1; a < 4; ++a) y += st.weights[static_cast<std::size_t>(a)] * sample(seg, st.start + a);
    return y;
  }

 private:
  const History& history_;
  const std::vector<Vector>& outputs_;
  int m_;
  int stride_ = 1;
};

class Recorder {
 public:
  Recorder(const DelaySystem& system, double dt, int m, int record_every)
      : system_(system), dt_(dt) {
    traj_.tau = system.tau;
    traj_.dt = dt * record_every;
    traj_.steps_per_delay = m;
    traj_.record_every = record_every;
    traj_.labels = system.labels;
  }

  void record(long n, const Vector& U) {
    traj_.times.push_back(static_cast<double>(n) * dt_);
    traj_.states.push_back(U);
    traj_.norms.push_back(system_.norm(U));
    traj_.outputs.push_back(system_.output(U));
    traj_.last_valid_time = traj_.times.back();
  }

  void diverged(long last_good) {
    traj_.diverged = true;
    traj_.last_valid_time = static_cast<double>(last_good) * dt_;
  }

  Trajectory take() { return std::move(traj_); }

 private:
  const DelaySystem& system_;
  double dt_;
  Trajectory traj_;
};

bool blown_up(const DelaySystem& system, const Vector& U, double guard) {
  return !U.allFinite() || system.norm(U) > guard;
}

}  // namespace

Trajectory solve_method_of_steps(const DelaySystem& system, const Vector& U0,
                                 const History& history, const SolverConfig& config) {
  check_inputs(system, U0, history);
  const int m = steps_per_delay(config, system.tau);
  if (config.record_every < 1) throw ConfigError("record_every must be at least 1");
  if (!(config.horizon >= 0.0)) throw ConfigError("horizon must be nonnegative");
  const double dt = system.tau / m;
  const long steps = std::lround(config.horizon / dt);

  const Matrix& A = system.A;
  const Matrix kin = system.k * system.input_map;
  const bool nonlinear = !system.linear();

  std::vector<Vector> outputs;
  outputs.reserve(static_cast<std::size_t>(steps) + 1);
  DelayedSignal delayed(history, outputs, m);
  Recorder rec(system, dt, m, config.record_every);

  auto rhs = [&](const Vector& U, const Vector& y) -> Vector {
    Vector f = A * U;
    if (nonlinear) f += system.nonlinear_term(U);
    if (system.k != 0.0) f.noalias() += kin * y;
    return f;
  };

  Eigen::PartialPivLU<Matrix> implicit_lu;
  Matrix explicit_half;
  if (config.integrator == Integrator::ImplicitMidpoint) {
    const Matrix I = Matrix::Identity(system.dim(), system.dim());
    implicit_lu.compute(I - 0.5 * dt * A);
    explicit_half = I + 0.5 * dt * A;
  }

  Vector U = U0;
  outputs.push_back(system.output(U));
  rec.record(0, U);
  if (blown_up(system, U, config.blowup_guard)) {
    rec.diverged(0);
    return rec.take();
  }

  for (long n = 0; n < steps; ++n) {
    const int seg = static_cast<int>(n / m);
    const int i = static_cast<int>(n - static_cast<long>(seg) * m);
    const Vector y0 = delayed.sample(seg, i);
    const Vector yh = delayed.at(seg, i + 0.5);
    const Vector y1 = delayed.sample(seg, i + 1);

    Vector next;
    if (config.integrator == Integrator::RK4) {
      const Vector k1 = rhs(U, y0);
      const Vector k2 = rhs(U + 0.5 * dt * k1, yh);
      const Vector k3 = rhs(U + 0.5 * dt * k2, yh);
      const Vector k4 = rhs(U + dt * k3, y1);
      next = U + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      Vector forcing = Vector::Zero(U.size());
      if (system.k != 0.0) forcing = kin * yh;
      const Vector base = explicit_half * U + dt * forcing;
      if (!nonlinear) {
        next = implicit_lu.solve(base);
      } else {
        next = implicit_lu.solve(Vector(base + dt * system.nonlinear_term(U)));
        for (int it = 0; it < 100; ++it) {
          const Vector mid = 0.5 * (U + next);
          const Vector trial = implicit_lu.solve(Vector(base + dt * system.nonlinear_term(mid)));
          const double change = (trial - next).norm();
          next = trial;
          if (change <= 1e-15 * (1.0 + next.norm())) break;
        }
      }
    }

    if (blown_up(system, next, config.blowup_guard)) {
      rec.diverged(n);
      return rec.take();
    }
    U = std::move(next);
    outputs.push_back(system.output(U));
    if ((n + 1) % config.record_every == 0) rec.record(n + 1, U);
  }
  return rec.take();
}

Trajectory duhamel_oracle(const DelaySystem& system, const Vector& U0, const History& history,
                          double horizon, int gauss_points) {
  if (!system.linear())
    throw UnsupportedRegime("the Duhamel oracle only handles linear systems");
  check_inputs(system, U0, history);
  const int m = history.subintervals();
  if (m < 4) throw ConfigError("Duhamel oracle needs at least 4 history subintervals");
  const double dt = system.tau / m;
  const long steps = std::lround(horizon / dt);

  const Matrix E = linalg::expm(dt * system.A);
  const auto rule = linalg::gauss_legendre(gauss_points);
  std::vector<Matrix> kernels;
  if (system.k != 0.0) {
    for (double c : rule.nodes)
      kernels.push_back(linalg::expm((1.0 - c) * dt * system.A) * (system.k * system.input_map));
  }

  std::vector<Vector> outputs;
  outputs.reserve(static_cast<std::size_t>(steps) + 1);
  DelayedSignal delayed(history, outputs, m);
  Recorder rec(system, dt, m, 1);

  Vector U = U0;
  outputs.push_back(system.output(U));
  rec.record(0, U);
  for (long n = 0; n < steps; ++n) {
    const int seg = static_cast<int>(n / m);
    const int i = static_cast<int>(n - static_cast<long>(seg) * m);
    Vector next = E * U;
    for (std::size_t q = 0; q < kernels.size(); ++q)
      next.noalias() += (dt * rule.weights[q]) * (kernels[q] * delayed.at(seg, i + rule.nodes[q]));
    U = std::move(next);
    outputs.push_back(system.output(U));
    rec.record(n + 1, U);
  }
  return rec.take();
}

std::vector<Vector> initial_transport_profile(const History& history, int n_rho) {
  if (n_rho < 1) throw ConfigError("n_rho must be positive");
  const int m = history.subintervals();
  std::vector<Vector> Z;
  Z.reserve(static_cast<std::size_t>(n_rho) + 1);
  for (int j = 0; j <= n_rho; ++j) {
    // rho_j = j / n_rho maps to history position (1 - rho_j) m
    const long num = static_cast<long>(n_rho - j) * m;
    const long cell = num / n_rho;
    const long rem = num % n_rho;
    if (rem == 0) {
      Z.push_back(history.sample(static_cast<int>(cell)));
    } else {
      const double w = static_cast<double>(rem) / n_rho;
      Z.push_back((1.0 - w) * history.sample(static_cast<int>(cell)) +
                  w * history.sample(static_cast<int>(cell) + 1));
    }
  }
  return Z;
}

Trajectory solve_transport_augmented(const DelaySystem& system, const Vector& U0,
                                     const History& history, const SolverConfig& config,
                                     int n_rho) {
  check_inputs(system, U0, history);
  if (n_rho < 8) throw ConfigError("n_rho must be at least 8");
  if (config.record_every < 1) throw ConfigError("record_every must be at least 1");
  const int m = steps_per_delay(config, system.tau);
  const double dt = system.tau / m;
  if (dt > system.tau / n_rho * (1.0 + 1e-12))
    throw ConfigError("CFL violated: dt must not exceed tau / n_rho");
  const long steps = std::lround(config.horizon / dt);

  const Index dim = system.dim();
  const Index p = system.channels();
  const Matrix kin = system.k * system.input_map;
  const double speed = n_rho / system.tau;
  const bool nonlinear = !system.linear();

  // X = [U; Z_1; ...; Z_n], Z_j in R^p.
  const Index total = dim + p * n_rho;
  Vector X(total);
  X.head(dim) = U0;
  const auto profile = initial_transport_profile(history, n_rho);
  for (int j = 1; j <= n_rho; ++j) X.segment(dim + p * (j - 1), p) = profile[static_cast<std::size_t>(j)];

  auto rhs = [&](const Vector& S) -> Vector {
    Vector out(total);
    const auto u = S.head(dim);
    out.head(dim) = system.A * u;
    if (nonlinear) out.head(dim) += system.nonlinear_term(u);
    if (system.k != 0.0) out.head(dim).noalias() += kin * S.segment(dim + p * (n_rho - 1), p);
    Vector upstream = system.output_map * u;
    for (int j = 1; j <= n_rho; ++j) {
      const auto zj = S.segment(dim + p * (j - 1), p);
      out.segment(dim + p * (j - 1), p) = -speed * (zj - upstream);
      upstream = zj;
    }
    return out;
  };

  Recorder rec(system, dt, m, config.record_every);
  rec.record(0, X.head(dim));
  for (long n = 0; n < steps; ++n) {
    const Vector k1 = rhs(X);
    const Vector k2 = rhs(X + 0.5 * dt * k1);
    const Vector k3 = rhs(X + 0.5 * dt * k2);
    const Vector k4 = rhs(X + dt * k3);
    Vector next = X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (blown_up(system, next.head(dim), config.blowup_guard)) {
      rec.diverged(n);
      return rec.take();
    }
    X = std::move(next);
    if ((n + 1) % config.record_every == 0) rec.record(n + 1, X.head(dim));
  }
  return rec.take();
}

}  // namespace delaystab
