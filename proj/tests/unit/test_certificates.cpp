#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <delaystab/certificates.hpp>

using namespace delaystab;
using High = boost::multiprecision::cpp_dec_float_50;

namespace {

// Independent high-precision evaluation of the closed forms.
struct HighBounded {
  High k0;
  High sigma;
};

HighBounded high_bounded(double M, double omega, double tau, double B, double k) {
  const High m(M), w(omega), t(tau), b(B), kk(k);
  const High g = exp(w * t);
  return {(g - 1) / (t * b * m * g), log(1 + abs(kk) * t * b * m * g) / t};
}

struct HighUnbounded {
  High C4;
  High k0;
  High delta;
  High sigma;
};

HighUnbounded high_unbounded(double M, double omega, double tau, double C1, double C2, double C3,
                             double k) {
  const High mp = M > 1.0 ? High(M) : High(1);
  const High w(omega), t(tau), c1(C1), c2(C2), c3(C3), kk(k);
  const High ratio = c3 / (mp * c1);
  const High c4 = c2 > ratio ? c2 : ratio;
  const High e2 = exp(2 * w * t);
  const High delta = abs(kk) * c1 * mp * e2;
  return {c4, (exp(w * t) - 1) / (mp * mp * c1 * c4 * e2), delta, log(1 + delta * c4 * mp) / t};
}

double rel(double got, const High& want) {
  const double w = want.convert_to<double>();
  return std::abs(got - w) / std::max(std::abs(w), 1e-300);
}

}  // namespace

TEST(BoundedCertificate, LogTwoExample) {
  const double tau = std::numbers::ln2;
  const auto c = bounded_certificate(1.0, 1.0, tau, 1.0, 0.0);
  EXPECT_NEAR(c.k0, 0.72134752044448170368, 1e-15);
  EXPECT_LT(rel(c.k0, high_bounded(1.0, 1.0, tau, 1.0, 0.0).k0), 1e-15);
  EXPECT_EQ(c.sigma, 0.0);
  EXPECT_EQ(c.omega_prime, 1.0);
  EXPECT_TRUE(c.stable);
}

TEST(BoundedCertificate, AtThresholdRateIsFullyConsumed) {
  const double tau = std::numbers::ln2;
  const double k0 = bounded_certificate(1.0, 1.0, tau, 1.0, 0.0).k0;
  const auto c = bounded_certificate(1.0, 1.0, tau, 1.0, k0);
  EXPECT_NEAR(c.sigma, 1.0, 1e-15);
  EXPECT_NEAR(c.omega_prime, 0.0, 1e-15);
  EXPECT_FALSE(c.stable);
}

TEST(BoundedCertificate, SigmaAgreesWithHighPrecision) {
  const auto c = bounded_certificate(2.0, 0.5, 1.0, 3.0, 0.01);
  EXPECT_NEAR(c.sigma, 0.094330860647827009599, 1e-16);
  EXPECT_LT(rel(c.sigma, high_bounded(2.0, 0.5, 1.0, 3.0, 0.01).sigma), 1e-14);
}

TEST(BoundedCertificate, RandomDrawsAgreeWithHighPrecision) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double M = 1.0 + u(rng), w = u(rng), t = u(rng), B = u(rng), k = u(rng) - 2.5;
    const auto c = bounded_certificate(M, w, t, B, k);
    const auto h = high_bounded(M, w, t, B, k);
    EXPECT_LT(rel(c.k0, h.k0), 1e-13);
    EXPECT_LT(rel(c.sigma, h.sigma), 1e-13);
  }
}

TEST(BoundedCertificate, RejectsNonpositiveInputs) {
  EXPECT_THROW(bounded_certificate(0.0, 1.0, 1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(bounded_certificate(1.0, -1.0, 1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(bounded_certificate(1.0, 1.0, 0.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(bounded_certificate(1.0, 1.0, 1.0, 0.0, 0.0), DomainError);
}

TEST(BoundedCertificate, Monotonicity) {
  double prev_sigma = -1.0;
  for (double k = 0.0; k < 2.0; k += 0.1) {
    const double s = bounded_certificate(1.5, 1.0, 0.7, 1.2, k).sigma;
    EXPECT_GT(s, prev_sigma);
    prev_sigma = s;
  }
  double prev_k0 = INFINITY;
  for (double B = 0.5; B < 5.0; B += 0.5) {
    const double k0 = bounded_certificate(1.5, 1.0, 0.7, B, 0.0).k0;
    EXPECT_LT(k0, prev_k0);
    prev_k0 = k0;
  }
  prev_k0 = INFINITY;
  for (double M = 1.0; M < 5.0; M += 0.5) {
    const double k0 = bounded_certificate(M, 1.0, 0.7, 1.2, 0.0).k0;
    EXPECT_LT(k0, prev_k0);
    prev_k0 = k0;
  }
}

TEST(BoundedCertificate, SmallDelayLimit) {
  const double M = 1.3, omega = 0.8, B = 2.1;
  const double k0 = bounded_certificate(M, omega, 1e-6, B, 0.0).k0;
  EXPECT_NEAR(k0 / (omega / (B * M)), 1.0, 1e-4);
}

TEST(UnboundedCertificate, LogTwoExample) {
  const auto c = unbounded_certificate(1.0, 1.0, std::numbers::ln2, 1.0, 1.0, 1.0, 0.0);
  EXPECT_EQ(c.Mprime, 1.0);
  EXPECT_EQ(c.C4, 1.0);
  EXPECT_NEAR(c.k0, 0.25, 1e-15);
  EXPECT_EQ(c.delta, 0.0);
  EXPECT_EQ(c.sigma, 0.0);
}

TEST(UnboundedCertificate, ThresholdAndBranches) {
  const auto base = unbounded_certificate(0.7, 0.9, 0.5, 1.1, 0.4, 2.0, 0.0);
  EXPECT_EQ(base.Mprime, 1.0);
  const auto at = unbounded_certificate(0.7, 0.9, 0.5, 1.1, 0.4, 2.0, base.k0);
  EXPECT_NEAR(at.sigma / at.omega, 1.0, 1e-12);
  EXPECT_FALSE(at.stable);
  const auto big = unbounded_certificate(1.0, 1.0, 1.0, 1.0, 1.0, 10.0, 0.1);
  EXPECT_EQ(big.C4, 10.0);
}

TEST(UnboundedCertificate, RandomDrawsAgreeWithHighPrecision) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  for (int i = 0; i < 200; ++i) {
    const double M = u(rng), w = u(rng), t = u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng),
                 k = u(rng) - 2.0;
    const auto c = unbounded_certificate(M, w, t, c1, c2, c3, k);
    const auto h = high_unbounded(M, w, t, c1, c2, c3, k);
    EXPECT_LT(rel(c.C4, h.C4), 1e-15);
    EXPECT_LT(rel(c.k0, h.k0), 1e-13);
    EXPECT_LT(rel(c.sigma, h.sigma), 1e-13);
  }
  EXPECT_THROW(unbounded_certificate(1, 1, 1, 0, 1, 1, 0), DomainError);
}

TEST(HistoryWeight, ClosedFormIntegrals) {
  const double tau = std::numbers::ln2;
  const History zero = History::constant(tau, 64, Vector::Zero(1));
  EXPECT_EQ(history_weight_alpha(zero, 1.0), 0.0);
  const History ones = History::constant(tau, 4096, Vector::Ones(1));
  EXPECT_NEAR(history_weight_alpha(ones, 1.0), 1.0, 1e-7);
  const History decaying =
      History::from_function(tau, 16, [](double s) { return Vector::Constant(1, std::exp(-s)); });
  EXPECT_NEAR(history_weight_alpha(decaying, 1.0), tau, 1e-15);
}

TEST(Envelope, ClosedFormsAndMonotonicity) {
  const auto c0 = bounded_certificate(2.0, 0.5, 1.0, 3.0, 0.0);
  EXPECT_DOUBLE_EQ(envelope_bound(3.0, c0, 1.5, 7.0), 2.0 * 1.5 * std::exp(-1.5));
  const auto c = bounded_certificate(2.0, 0.5, 1.0, 3.0, 0.01);
  EXPECT_DOUBLE_EQ(envelope_bound(0.0, c, 1.0, 1.0), 2.0 * 1.01);
  EXPECT_NEAR(envelope_bound(2.0, c, 1.0, 1.0), 0.89741150308065583150, 1e-15);
  double prev = INFINITY;
  for (double t = 0.0; t < 20.0; t += 0.5) {
    const double e = envelope_bound(t, c, 1.0, 1.0);
    EXPECT_LT(e, prev);
    prev = e;
  }
  const auto u = unbounded_certificate(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.01);
  EXPECT_DOUBLE_EQ(envelope_bound(0.0, u, 1.0, 2.0), u.Mprime * (1.0 + u.delta * 2.0));
  StabilityCertificate broken = c;
  broken.Bnorm = 0.0;
  EXPECT_THROW(envelope_bound(0.0, broken, 1.0, 1.0), DomainError);
}

TEST(EnvelopeParams, RateSignFollowsVerdict) {
  for (double k = 0.0; k < 1.0; k += 0.05) {
    const auto c = bounded_certificate(1.0, 1.0, 0.5, 1.0, k);
    const auto p = envelope_params(c, 1.0, 0.0);
    EXPECT_EQ(p.rate < 0.0, c.stable) << k;
  }
}

TEST(Semilinear, Thresholds) {
  StabilityCertificate c = bounded_certificate(1.0, 1.0, 1.0, 1.0, 0.0);
  c.omega_prime = 0.0;
  EXPECT_EQ(semilinear_thresholds(c, 2.0), 0.0);
  c.omega_prime = 0.5;
  EXPECT_DOUBLE_EQ(semilinear_thresholds(c, 2.0), 0.25);
  EXPECT_DOUBLE_EQ(semilinear_thresholds(c, 4.0), 0.125);
  EXPECT_THROW(semilinear_thresholds(c, 0.0), DomainError);

  const auto base = bounded_certificate(1.0, 1.0, 0.5, 1.0, 0.1);
  const auto s = semilinear_certificate(base, 2.0, 0.0, "test");
  EXPECT_EQ(s.regime, Regime::BoundedSemilinear);
  EXPECT_TRUE(s.stable);
  EXPECT_FALSE(semilinear_certificate(base, 2.0, s.gamma_max, "test").stable);
}

TEST(TildeM, ClosedForms) {
  EXPECT_DOUBLE_EQ(tilde_M_estimate(1.7, 0.0, 1.0, 0.3), 1.7);
  EXPECT_DOUBLE_EQ(tilde_M_estimate(0.5, 0.0, 1.0, 0.3), 1.0);
  EXPECT_NEAR(transport_h2(1e-8, 1.0), 1.0, 1e-6);
  EXPECT_EQ(transport_h2(0.0, 1.0), 1.0);
  EXPECT_NEAR(transport_h2(1.0, 1.0), (std::exp(2.0) - 1.0) / 2.0, 1e-14);
  EXPECT_NEAR(tilde_M_estimate(1.0, 1.0, 1.0, 1.0), 2.0480546988460354873, 1e-14);
}

TEST(Recursions, ClosedFormMatchesRecursion) {
  const auto c = unbounded_certificate(1.3, 0.8, 0.4, 0.9, 1.1, 1.7, 0.02);
  const auto rows = verify_recursions(c, 60, 1.4, 0.6);
  ASSERT_EQ(rows.size(), 61u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.K2_recursive / r.K2_closed, 1.0, 1e-9) << r.ell;
    EXPECT_NEAR(r.K1_closed * c.C4, r.K2_closed, 1e-12 * r.K2_closed);
  }
  const double ratio = 1.0 + c.delta * c.C4 * c.Mprime;
  EXPECT_NEAR(rows[60].K2_recursive / rows[59].K2_recursive, ratio, 1e-12);
}

TEST(Recursions, HandUnrolledFirstTerm) {
  StabilityCertificate c;
  c.regime = Regime::UnboundedLinear;
  c.C4 = 2.0;
  c.Mprime = 1.0;
  c.delta = 0.1;
  const auto rows = verify_recursions(c, 3, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].K2_recursive, 2.2);
  EXPECT_DOUBLE_EQ(rows[0].K2_closed, 2.2);
  c.delta = 0.0;
  for (const auto& r : verify_recursions(c, 5, 1.0, 1.0)) EXPECT_DOUBLE_EQ(r.K2_recursive, 2.0);
  EXPECT_THROW(verify_recursions(bounded_certificate(1, 1, 1, 1, 0), 3, 1.0, 1.0),
               UnsupportedRegime);
}
