#include "delaystab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "delaystab/certificates.hpp"
#include "delaystab/linalg.hpp"
#include "delaystab/models.hpp"

namespace delaystab {

namespace {

double trapezoid_sq_norm(const DelaySystem& system, const std::vector<Vector>& piece, double dt) {
  if (piece.size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < piece.size(); ++j) {
    const double n = system.output_norm(piece[j]);
    const double w = (j == 0 || j + 1 == piece.size()) ? 0.5 : 1.0;
    sum += w * n * n;
  }
  return sum * dt;
}

const SecondOrderLayout& require_layout(const DelaySystem& system) {
  if (!system.layout) throw DomainError("energy needs a second-order (u, u_t) model");
  return *system.layout;
}

}  // namespace

double energy(const DelaySystem& system, const Vector& state, const TrailingWindow& window) {
  const SecondOrderLayout& layout = require_layout(system);
  if (window.pieces.empty() || !(window.dt > 0.0))
    throw DomainError("energy needs the trailing delay window");
  std::size_t segments = 0;
  for (const auto& piece : window.pieces)
    if (!piece.empty()) segments += piece.size() - 1;
  const double span = static_cast<double>(segments) * window.dt;
  if (std::abs(span - system.tau) > 1e-9 * system.tau)
    throw DomainError("trailing window does not cover one delay interval");

  const Index n = layout.nodes;
  const auto u = state.head(n);
  const auto v = state.tail(n);
  double E = 0.5 * v.cwiseAbs2().dot(layout.mass) + 0.5 * u.dot(layout.stiffness * u);
  if (system.nonlinearity) E -= G_value(u, system.nonlinearity->beta, layout.mass);
  if (system.k != 0.0) {
    double integral = 0.0;
    for (const auto& piece : window.pieces) integral += trapezoid_sq_norm(system, piece, window.dt);
    E += 0.5 * std::abs(system.k) * integral;
  }
  return E;
}

std::vector<double> energy_series(const DelaySystem& system, const Trajectory& trajectory,
                                  const History& history) {
  require_layout(system);
  if (trajectory.record_every != 1)
    throw ConfigError("energy series needs a trajectory recorded at every solver step");
  const int m = trajectory.steps_per_delay;
  if (m < 1 || history.subintervals() % m != 0)
    throw ConfigError("history grid must refine the trajectory grid");
  const int stride = history.subintervals() / m;

  std::vector<double> out;
  out.reserve(trajectory.size());
  for (std::size_t n = 0; n < trajectory.size(); ++n) {
    TrailingWindow window;
    window.dt = trajectory.dt;
    const long first = static_cast<long>(n) - m;  // grid index of t - tau
    if (first < 0) {
      std::vector<Vector> past;
      for (long j = static_cast<long>(n); j <= m; ++j)
        past.push_back(history.sample(static_cast<int>(j) * stride));
      window.pieces.push_back(std::move(past));
    }
    std::vector<Vector> recent;
    for (long j = std::max(first, 0L); j <= static_cast<long>(n); ++j)
      recent.push_back(trajectory.outputs[static_cast<std::size_t>(j)]);
    window.pieces.push_back(std::move(recent));
    out.push_back(energy(system, trajectory.states[n], window));
  }
  return out;
}

std::vector<std::size_t> energy_monotone_check(std::span<const double> energies, double tol) {
  std::vector<std::size_t> bad;
  for (std::size_t n = 0; n + 1 < energies.size(); ++n)
    if (energies[n + 1] > energies[n] + tol) bad.push_back(n);
  return bad;
}

std::vector<double> log_time_grid(double t_max, int samples, double shift) {
  if (!(t_max > 0.0) || samples < 2) throw DomainError("time grid needs t_max > 0 and 2+ samples");
  const double decades = 4.0;
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double frac = (i + shift) / (samples - 1);
    if (frac > 1.0) break;
    t.push_back(t_max * std::pow(10.0, -decades * (1.0 - frac)));
  }
  return t;
}

double sampled_growth(const Matrix& A, const Matrix& gram, double omega,
                      std::span<const double> times) {
  const Matrix L = linalg::gram_factor(gram, A.rows());
  // A_hat = L^T A L^{-T} is A in coordinates where the model norm is Euclidean.
  const Matrix LtA = L.transpose() * A;
  const Matrix Ahat =
      L.transpose().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(LtA);
  double best = 0.0;
  for (double t : times)
    best = std::max(best, linalg::spectral_norm(linalg::expm(t * Ahat)) * std::exp(omega * t));
  return best;
}

double default_semigroup_horizon(double omega, double margin) {
  const double eps = std::max(margin, 1e-3) * omega;
  return std::max(10.0 / omega, 5.0 / eps);
}

SemigroupEstimate estimate_semigroup_constants(const Matrix& A, double t_max, int samples,
                                               double margin, const Matrix& gram) {
  if (!(margin >= 0.0 && margin < 1.0)) throw DomainError("margin must lie in [0, 1)");
  const double abscissa = linalg::spectral_abscissa(A);
  if (!(abscissa < 0.0))
    throw DomainError("generator is not exponentially stable (spectral abscissa >= 0)");
  SemigroupEstimate est;
  est.margin = margin;
  est.omega = (1.0 - margin) * (-abscissa);
  const auto times = log_time_grid(t_max, samples);
  est.M = std::max(1.0, sampled_growth(A, gram, est.omega, times));
  return est;
}

double delay_operator_norm(const DelaySystem& system) {
  const Matrix L = linalg::gram_factor(system.gram, system.dim());
  return linalg::weighted_operator_norm(system.input_map * system.output_map, L, L);
}

double estimate_mu(const Matrix& Bstar, const Matrix& Cstar) {
  if (Bstar.cols() != Cstar.cols()) throw DomainError("Bstar and Cstar act on different spaces");
  if (Bstar.norm() == 0.0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(Cstar, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = std::max(Cstar.rows(), Cstar.cols()) * 1e-13 * (sv.size() ? sv[0] : 0.0);
  Index rank = 0;
  while (rank < sv.size() && sv[rank] > tol) ++rank;
  const Matrix& V = svd.matrixV();
  const Index n = Cstar.cols();
  if (rank < n) {
    const double leak = linalg::spectral_norm(Bstar * V.rightCols(n - rank));
    if (leak > 1e-12 * Bstar.norm()) return std::numeric_limits<double>::infinity();
  }
  if (rank == 0) return std::numeric_limits<double>::infinity();
  // x = V_r Sigma_r^{-1} z gives |Cstar x| = |z|.
  const Matrix scaled = Bstar * V.leftCols(rank) * sv.head(rank).cwiseInverse().asDiagonal();
  const double s = linalg::spectral_norm(scaled);
  return s * s;
}

namespace {

/// Largest eigenvalue of a symmetric positive semidefinite operator by Lanczos
/// with full reorthogonalization.
template <class Apply>
double lanczos_top_eigenvalue(Index n, Apply&& apply, int max_iter = 120) {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  Vector q(n);
  for (Index i = 0; i < n; ++i) q[i] = normal(rng);
  q.normalize();
  const int steps = static_cast<int>(std::min<Index>(max_iter, n));
  Matrix Q(n, steps);
  std::vector<double> diag;
  std::vector<double> off;
  double previous = 0.0;
  for (int j = 0; j < steps; ++j) {
    Q.col(j) = q;
    Vector w = apply(q);
    diag.push_back(q.dot(w));
    for (int pass = 0; pass < 2; ++pass)
      w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
    const double beta = w.norm();

    const auto size = static_cast<Index>(diag.size());
    Matrix Tm = Matrix::Zero(size, size);
    for (Index i = 0; i < size; ++i) Tm(i, i) = diag[static_cast<std::size_t>(i)];
    for (Index i = 0; i + 1 < size; ++i)
      Tm(i, i + 1) = Tm(i + 1, i) = off[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Tm, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().maxCoeff();
    if (beta <= 1e-14 * std::max(1.0, std::abs(top))) return top;
    if (j > 4 && std::abs(top - previous) <= 1e-13 * std::abs(top)) return top;
    previous = top;
    off.push_back(beta);
    q = w / beta;
  }
  return previous;
}

}  // namespace

AdmissibilityEstimate estimate_admissibility(const DelaySystem& system, double tau, int m) {
  if (!system.linear()) throw UnsupportedRegime("admissibility constants need a linear system");
  if (!(tau > 0.0) || m < 2) throw DomainError("admissibility grid needs tau > 0 and m >= 2");
  const Index p = system.channels();
  const Matrix L = linalg::gram_factor(system.gram, system.dim());
  const Matrix Ahat = L.transpose().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(
      Matrix(L.transpose() * system.A));
  const Matrix Chat = L.transpose() * system.input_map;
  const Matrix ChatStar = L.transpose().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(
      system.output_map);
  const Vector ow = system.output_weights.size() ? system.output_weights : Vector::Ones(p);
  const Vector ow_sqrt = ow.cwiseSqrt();
  const Vector ow_isqrt = ow_sqrt.cwiseInverse();

  const double ds = tau / m;
  std::vector<double> c(static_cast<std::size_t>(m) + 1, ds);
  c.front() = c.back() = 0.5 * ds;
  const Matrix step = linalg::expm(ds * Ahat);

  // X_r = e^{r ds A_hat} Chat D^{-1/2} and Y_r = D^{1/2} Chat* e^{r ds A_hat}.
  std::vector<Matrix> X(static_cast<std::size_t>(m) + 1);
  std::vector<Matrix> Y(static_cast<std::size_t>(m) + 1);
  X[0] = Chat * ow_isqrt.asDiagonal();
  Y[0] = ow_sqrt.asDiagonal() * ChatStar;
  for (int r = 1; r <= m; ++r) {
    X[static_cast<std::size_t>(r)] = step * X[static_cast<std::size_t>(r - 1)];
    Y[static_cast<std::size_t>(r)] = Y[static_cast<std::size_t>(r - 1)] * step;
  }

  AdmissibilityEstimate est;
  est.grid = m;
  est.tau = tau;
  est.mesh = system.labels.count("N") ? "N=" + system.labels.at("N") : "dim=" + std::to_string(system.dim());

  const Index dim = system.dim();
  Matrix G1 = Matrix::Zero(dim, dim);
  Matrix G2 = Matrix::Zero(dim, dim);
  for (int j = 0; j <= m; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const Matrix& Xj = X[static_cast<std::size_t>(m - j)];  // e^{(tau - s_j) A}
    G1.noalias() += c[ju] * (Xj * Xj.transpose());
    G2.noalias() += c[ju] * (Y[ju].transpose() * Y[ju]);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> e1(G1, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> e2(G2, Eigen::EigenvaluesOnly);
  est.C1 = std::sqrt(std::max(0.0, e1.eigenvalues().maxCoeff()));
  est.C2 = std::sqrt(std::max(0.0, e2.eigenvalues().maxCoeff()));

  // Kernel K_r = D^{1/2} Chat* e^{r ds A} Chat D^{-1/2}, stored flat as p x p
  // row-major blocks.
  const auto pu = static_cast<std::size_t>(p);
  const auto mu = static_cast<std::size_t>(m);
  std::vector<double> kernel((mu + 1) * pu * pu);
  for (std::size_t r = 0; r <= mu; ++r) {
    const Matrix Kr = ow_sqrt.asDiagonal() * ChatStar * X[r];
    for (std::size_t a = 0; a < pu; ++a)
      for (std::size_t b = 0; b < pu; ++b)
        kernel[(r * pu + a) * pu + b] = Kr(static_cast<Index>(a), static_cast<Index>(b));
  }
  std::vector<double> sqrt_c(mu + 1);
  for (std::size_t i = 0; i <= mu; ++i) sqrt_c[i] = std::sqrt(c[i]);
  const Index n = p * (m + 1);

  // (T v)_i = sqrt(c_i) sum_{j<=i} q^{(i)}_j K_{i-j} v_j / sqrt(c_j), q^{(i)} the
  // trapezoid weights of [0, s_i]; T^T T is handed to Lanczos.
  auto weight = [&](std::size_t i, std::size_t j) {
    const double q = (j == 0 || j == i) ? 0.5 * ds : ds;
    return sqrt_c[i] * q / sqrt_c[j];
  };
  auto apply_normal = [&](const Vector& v) {
    std::vector<double> y(pu * (mu + 1), 0.0);
    for (std::size_t i = 1; i <= mu; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double w = weight(i, j);
        const double* K = &kernel[(i - j) * pu * pu];
        for (std::size_t a = 0; a < pu; ++a) {
          double acc = 0.0;
          for (std::size_t b = 0; b < pu; ++b) acc += K[a * pu + b] * v[static_cast<Index>(j * pu + b)];
          y[i * pu + a] += w * acc;
        }
      }
    Vector out = Vector::Zero(n);
    for (std::size_t j = 0; j <= mu; ++j)
      for (std::size_t i = std::max<std::size_t>(j, 1); i <= mu; ++i) {
        const double w = weight(i, j);
        const double* K = &kernel[(i - j) * pu * pu];
        for (std::size_t b = 0; b < pu; ++b) {
          double acc = 0.0;
          for (std::size_t a = 0; a < pu; ++a) acc += K[a * pu + b] * y[i * pu + a];
          out[static_cast<Index>(j * pu + b)] += w * acc;
        }
      }
    return out;
  };
  est.C3 = std::sqrt(std::max(0.0, lanczos_top_eigenvalue(n, apply_normal)));
  return est;
}

DecayFit fit_decay_envelope(std::span<const double> times, std::span<const double> values,
                            double tau, double t0, double t1) {
  if (times.size() != values.size()) throw DomainError("times and values differ in length");
  if (!(tau > 0.0)) throw DomainError("tau must be positive");
  std::vector<double> ts;
  std::vector<double> ys;
  long current = -1;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t < t0 - 1e-12 * std::abs(t0) || t > t1 + 1e-12 * std::abs(t1)) continue;
    if (!(values[i] > 0.0)) throw DomainError("decay fit needs positive values in the window");
    const long interval = static_cast<long>(std::floor(t / tau * (1.0 + 1e-14)));
    if (interval != current) {
      current = interval;
      ts.push_back(t);
      ys.push_back(values[i]);
    } else if (values[i] > ys.back()) {
      ts.back() = t;
      ys.back() = values[i];
    }
  }
  if (ts.size() < 2) {
    // Window shorter than two delay intervals: fall back to the raw samples.
    ts.clear();
    ys.clear();
    for (std::size_t i = 0; i < times.size(); ++i)
      if (times[i] >= t0 && times[i] <= t1) {
        ts.push_back(times[i]);
        ys.push_back(values[i]);
      }
  }
  if (ts.size() < 2) throw DomainError("decay fit needs at least two points");

  const auto npts = static_cast<Index>(ts.size());
  Matrix X(npts, 2);
  Vector y(npts);
  for (Index i = 0; i < npts; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = ts[static_cast<std::size_t>(i)];
    y[i] = std::log(ys[static_cast<std::size_t>(i)]);
  }
  const Vector beta = X.colPivHouseholderQr().solve(y);
  DecayFit fit;
  fit.M_fit = std::exp(beta[0]);
  fit.rate_fit = -beta[1];
  fit.residual = std::sqrt((X * beta - y).squaredNorm() / static_cast<double>(npts));
  fit.t0 = t0;
  fit.t1 = t1;
  fit.points = static_cast<int>(npts);
  return fit;
}

DecayFit fit_decay_rate(const Trajectory& trajectory, double t0, double t1, FitSignal use) {
  if (use == FitSignal::Energy) {
    if (trajectory.energies.size() != trajectory.times.size())
      throw DomainError("trajectory carries no energies");
    return fit_decay_envelope(trajectory.times, trajectory.energies, trajectory.tau, t0, t1);
  }
  return fit_decay_envelope(trajectory.times, trajectory.norms, trajectory.tau, t0, t1);
}

BoundReport verify_iterative_bound(const Trajectory& trajectory, const StabilityCertificate& cert,
                                   double U0_norm, double alpha, double tol,
                                   const SemigroupEstimate& constants) {
  BoundReport report;
  report.tolerance = tol;
  report.constants = constants;
  report.worst_slack = std::numeric_limits<double>::infinity();
  const double prefactor = cert.regime == Regime::UnboundedLinear
                               ? cert.Mprime * (U0_norm + cert.delta * alpha)
                               : cert.M * (U0_norm + std::abs(cert.k) * alpha);
  const double growth = cert.growth_factor();
  const long m = trajectory.steps_per_delay;
  if (m < 1) throw DomainError("trajectory is missing its delay grid");
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const long step = static_cast<long>(i) * trajectory.record_every;
    // t in [0, (n + 1) tau] with the smallest admissible n
    const long n = step == 0 ? 0 : (step + m - 1) / m - 1;
    const double t = trajectory.times[i];
    BoundSample s;
    s.t = t;
    s.measured = trajectory.norms[i];
    s.envelope = prefactor * std::pow(growth, static_cast<double>(n)) * std::exp(-cert.omega * t);
    s.slack = s.envelope > 0.0 ? (s.envelope - s.measured) / s.envelope
                               : (s.measured > 0.0 ? -std::numeric_limits<double>::infinity() : 0.0);
    report.worst_slack = std::min(report.worst_slack, s.slack);
    if (s.slack < -tol) report.violated = true;
    report.samples.push_back(s);
  }
  if (report.samples.empty()) report.worst_slack = 0.0;
  return report;
}

std::complex<double> reflection_coefficient(double xi, double a) {
  using namespace std::complex_literals;
  const std::complex<double> denom = xi * std::sin(xi) - (a + 1i * xi) * std::cos(xi);
  return a * std::exp(-1i * xi) / denom;
}

ReflectionScan sup_scan(double a, double xi_min, double xi_max, double step, bool keep_table) {
  if (!(step > 0.0) || !(xi_max >= xi_min)) throw DomainError("invalid scan grid");
  using namespace std::complex_literals;
  ReflectionScan scan;
  const auto count = static_cast<long>(std::floor((xi_max - xi_min) / step + 1e-9));
  for (long i = 0; i <= count; ++i) {
    const double xi = xi_min + static_cast<double>(i) * step;
    const std::complex<double> denom = xi * std::sin(xi) - (a + 1i * xi) * std::cos(xi);
    const double mag = a / std::abs(denom);
    scan.min_denominator = std::min(scan.min_denominator, std::abs(denom));
    if (mag > scan.sup) {
      scan.sup = mag;
      scan.argmax = xi;
    }
    if (keep_table) scan.table.emplace_back(xi, mag);
  }
  return scan;
}

double psi_constant(const SecondOrderLayout& layout, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  Eigen::LLT<Matrix> llt(layout.stiffness);
  if (llt.info() != Eigen::Success) throw DomainError("stiffness is not positive definite");
  const Index n = layout.nodes;
  const Matrix Kinv = llt.solve(Matrix::Identity(n, n));
  const double c_inf = std::sqrt(Kinv.diagonal().maxCoeff());
  // max u^T W u / u^T K u
  const Matrix Lk = llt.matrixL();
  const Matrix Linv = Lk.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  const Matrix S = Linv * layout.mass.asDiagonal() * Linv.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  const double c_2 = std::sqrt(eig.eigenvalues().maxCoeff());
  return std::pow(c_inf, beta) * c_2;
}

SmallnessRadius smallness_radius(double C_psi, double beta, double omega_prime, double Mtilde) {
  if (!(C_psi > 0.0) || !(beta > 0.0) || !(Mtilde > 0.0))
    throw DomainError("smallness radius needs positive C_psi, beta and Mtilde");
  auto psi_inverse = [&](double y) { return y > 0.0 ? std::pow(y / C_psi, 1.0 / beta) : 0.0; };
  SmallnessRadius r;
  r.energy_branch = 0.5 * psi_inverse(0.25);
  r.decay_branch = psi_inverse(omega_prime / Mtilde) / (2.0 * std::sqrt(2.0));
  r.rho0 = std::min(r.energy_branch, r.decay_branch);
  return r;
}

double data_size(const DelaySystem& system, const Vector& U0, const History& history) {
  const SecondOrderLayout& layout = require_layout(system);
  const Index n = layout.nodes;
  const auto u = U0.head(n);
  const auto v = U0.tail(n);
  const double g = history_l2_norm(history, system.output_weights);
  return std::sqrt(u.dot(layout.stiffness * u) + v.cwiseAbs2().dot(layout.mass) +
                   std::abs(system.k) * g * g);
}

}  // namespace delaystab
