#include "delaystab/certificates.hpp"

#include <algorithm>
#include <cmath>

namespace delaystab {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw DomainError(std::string(name) + " must be positive and finite");
}

double sample_norm(const Vector& f, const Vector& weights) {
  if (weights.size() == 0) return f.norm();
  return std::sqrt(f.cwiseAbs2().dot(weights));
}

}  // namespace

StabilityCertificate bounded_certificate(double M, double omega, double tau, double Bnorm,
                                         double k) {
  require_positive(M, "M");
  require_positive(omega, "omega");
  require_positive(tau, "tau");
  require_positive(Bnorm, "Bnorm");
  if (!std::isfinite(k)) throw DomainError("k must be finite");

  StabilityCertificate c;
  c.regime = Regime::BoundedLinear;
  c.M = M;
  c.omega = omega;
  c.tau = tau;
  c.k = k;
  c.Bnorm = Bnorm;
  c.Mprime = std::max(M, 1.0);
  const double growth = std::exp(tau * omega);
  c.k0 = std::expm1(tau * omega) / (tau * Bnorm * M * growth);
  c.sigma = std::log1p(std::abs(k) * tau * Bnorm * M * growth) / tau;
  c.omega_prime = omega - c.sigma;
  c.stable = std::abs(k) < c.k0;
  return c;
}

StabilityCertificate unbounded_certificate(double M, double omega, double tau, double C1,
                                           double C2, double C3, double k) {
  require_positive(M, "M");
  require_positive(omega, "omega");
  require_positive(tau, "tau");
  require_positive(C1, "C1");
  require_positive(C2, "C2");
  require_positive(C3, "C3");
  if (!std::isfinite(k)) throw DomainError("k must be finite");

  StabilityCertificate c;
  c.regime = Regime::UnboundedLinear;
  c.M = M;
  c.omega = omega;
  c.tau = tau;
  c.k = k;
  c.C1 = C1;
  c.C2 = C2;
  c.C3 = C3;
  c.Mprime = std::max(M, 1.0);
  c.C4 = std::max(C2, C3 / (c.Mprime * C1));
  const double e2 = std::exp(2.0 * omega * tau);
  c.k0 = std::expm1(tau * omega) / (c.Mprime * c.Mprime * C1 * c.C4 * e2);
  c.delta = std::abs(k) * C1 * c.Mprime * e2;
  c.sigma = std::log1p(c.delta * c.C4 * c.Mprime) / tau;
  c.omega_prime = omega - c.sigma;
  c.stable = std::abs(k) < c.k0;
  return c;
}

double history_weight_alpha(const History& history, double omega, const Vector& output_weights) {
  const int m = history.subintervals();
  const double ds = history.spacing();
  double sum = 0.0;
  for (int j = 0; j <= m; ++j) {
    const double w = (j == 0 || j == m) ? 0.5 : 1.0;
    sum += w * std::exp(omega * j * ds) * sample_norm(history.sample(j), output_weights);
  }
  return sum * ds;
}

double history_l2_norm(const History& history, const Vector& output_weights) {
  const int m = history.subintervals();
  const double ds = history.spacing();
  double sum = 0.0;
  for (int j = 0; j <= m; ++j) {
    const double w = (j == 0 || j == m) ? 0.5 : 1.0;
    const double n = sample_norm(history.sample(j), output_weights);
    sum += w * n * n;
  }
  return std::sqrt(sum * ds);
}

EnvelopeParams envelope_params(const StabilityCertificate& cert, double U0_norm, double alpha) {
  EnvelopeParams p;
  p.U0_norm = U0_norm;
  p.alpha = alpha;
  p.rate = cert.sigma - cert.omega;
  switch (cert.regime) {
    case Regime::BoundedLinear:
    case Regime::BoundedSemilinear:
      if (!(cert.Bnorm > 0.0)) throw DomainError("bounded certificate is missing Bnorm");
      p.C = cert.M * (U0_norm + std::abs(cert.k) * alpha);
      break;
    case Regime::UnboundedLinear:
      if (!(cert.C1 > 0.0) || !(cert.C4 > 0.0))
        throw DomainError("unbounded certificate is missing admissibility constants");
      p.C = cert.Mprime * (U0_norm + cert.delta * alpha);
      break;
  }
  return p;
}

double envelope_bound(double t, const StabilityCertificate& cert, double U0_norm, double alpha) {
  const EnvelopeParams p = envelope_params(cert, U0_norm, alpha);
  return p.C * std::exp(p.rate * t);
}

double semilinear_thresholds(const StabilityCertificate& cert, double Mtilde) {
  if (!(Mtilde > 0.0)) throw DomainError("Mtilde must be positive");
  return std::max(0.0, cert.omega_prime) / Mtilde;
}

StabilityCertificate semilinear_certificate(const StabilityCertificate& cert, double Mtilde,
                                            double gamma, std::string derivation) {
  if (cert.regime == Regime::UnboundedLinear)
    throw UnsupportedRegime("semilinear thresholds need a bounded delay operator");
  StabilityCertificate c = cert;
  c.regime = Regime::BoundedSemilinear;
  c.Mtilde = Mtilde;
  c.Mtilde_derivation = std::move(derivation);
  c.gamma = gamma;
  c.gamma_max = semilinear_thresholds(cert, Mtilde);
  c.stable = std::abs(c.k) < c.k0 && gamma < c.gamma_max;
  return c;
}

double transport_h2(double omega_prime, double tau) {
  require_positive(tau, "tau");
  const double x = 2.0 * omega_prime * tau;
  if (x == 0.0) return 1.0;
  return std::expm1(x) / x;
}

double tilde_M_estimate(double M, double Bnorm, double tau, double omega_prime) {
  require_positive(M, "M");
  if (!(Bnorm >= 0.0)) throw DomainError("Bnorm must be nonnegative");
  const double Mprime = std::max(M, 1.0);
  return Mprime * std::sqrt(1.0 + Bnorm * Bnorm * transport_h2(omega_prime, tau));
}

std::vector<RecursionRow> verify_recursions(const StabilityCertificate& cert, int ell_max,
                                            double U0_norm, double alpha) {
  if (cert.regime != Regime::UnboundedLinear)
    throw UnsupportedRegime("K1/K2 recursions belong to the unbounded regime");
  const double c4m = cert.C4 * cert.Mprime;
  const double base = U0_norm + cert.delta * alpha;
  const double ratio = 1.0 + cert.delta * c4m;

  std::vector<RecursionRow> rows;
  rows.reserve(static_cast<std::size_t>(std::max(ell_max, 0)) + 1);
  double running = alpha;  // sum_{j=-1}^{ell-1} K2(j)
  for (int ell = 0; ell <= ell_max; ++ell) {
    RecursionRow row;
    row.ell = ell;
    row.K2_recursive = c4m * (U0_norm + cert.delta * running);
    row.K2_closed = c4m * base * std::pow(ratio, ell);
    row.K1_closed = cert.Mprime * base * std::pow(ratio, ell);
    running += row.K2_recursive;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace delaystab
