#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <delaystab/diagnostics.hpp>
#include <delaystab/linalg.hpp>
#include <delaystab/models.hpp>

using namespace delaystab;

TEST(LinearToy, NormalGeneratorAndScaledDelay) {
  const std::vector<double> spectrum{-1.0, -2.0};
  const DelaySystem s = build_linear_toy(spectrum, 17, 1.0, 0.0, 1.0);
  EXPECT_TRUE(validate_system(s).empty());
  EXPECT_TRUE(s.linear());
  EXPECT_NEAR(linalg::spectral_norm(s.output_map), 1.0, 1e-12);
  for (double t : log_time_grid(50.0, 200))
    EXPECT_LE(linalg::spectral_norm(linalg::expm(t * s.A)) * std::exp(t), 1.0 + 1e-10);
  EXPECT_THROW(build_linear_toy(std::vector<double>{-1.0, 0.0}, 1, 1.0, 0.0, 1.0), DomainError);
}

TEST(LinearToy, SeedDeterminesMatrices) {
  const std::vector<double> spectrum{-1.0, -2.0, -3.0};
  const DelaySystem a = build_linear_toy(spectrum, 5, 2.0, 0.1, 1.0);
  const DelaySystem b = build_linear_toy(spectrum, 5, 2.0, 0.1, 1.0);
  const DelaySystem c = build_linear_toy(spectrum, 6, 2.0, 0.1, 1.0);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.output_map, b.output_map);
  EXPECT_NE(a.output_map, c.output_map);
}

TEST(WaveGrid, WeightsCoverTheInterior) {
  const WaveGrid g = WaveGrid::interior(9);
  EXPECT_DOUBLE_EQ(g.h, 0.1);
  EXPECT_NEAR(g.weights.sum(), 0.9, 1e-15);
  EXPECT_TRUE((g.weights.array() > 0.0).all());
  EXPECT_THROW(WaveGrid::interior(2), DomainError);
}

TEST(WaveInternal, ShapesNonlinearityAndPreconditions) {
  const DelaySystem s = build_wave_internal_1d(4, 1.0, 0.1, 1.0, 1.0, {0.0, 1.0}, {0.2, 0.8});
  EXPECT_EQ(s.dim(), 8);
  EXPECT_TRUE(validate_system(s).empty());
  EXPECT_EQ(s.nonlinear_term(Vector::Zero(8)), Vector::Zero(8));
  EXPECT_THROW(build_wave_internal_1d(4, 1.0, 0.1, 1.0, 1.0, {0.2, 0.6}, {0.1, 0.8}), DomainError);
  EXPECT_THROW(build_wave_internal_1d(4, 0.1, 0.1, 1.0, 1.0, {0.0, 1.0}, {0.2, 0.8}), DomainError);
  EXPECT_NE(s.labels.at("note").find("1D"), std::string::npos);
}

TEST(WaveInternal, UndelayedIsExponentiallyStable) {
  const DelaySystem s = build_wave_internal_1d(50, 1.0, 0.0, 1.0, std::nullopt, {0.0, 1.0}, {0.0, 1.0});
  EXPECT_LT(linalg::spectral_abscissa(s.A), -0.1);
}

TEST(WaveBoundary, StructureAndStability) {
  const int N = 50;
  const DelaySystem s = build_wave_boundary_1d(N, 1.0, 0.0, 1.0);
  EXPECT_TRUE(validate_system(s).empty());
  EXPECT_LT(linalg::spectral_abscissa(s.A), 0.0);
  const Index n = s.layout->nodes;
  Vector U = Vector::Zero(s.dim());
  U[n] = 3.0;  // u_t(0)
  EXPECT_EQ(s.output(U)[0], 3.0);
  for (Index r = 0; r < s.dim(); ++r) {
    if (r != n) {
      EXPECT_EQ(s.input_map(r, 0), 0.0);
    }
  }
  EXPECT_NE(s.input_map(n, 0), 0.0);
  EXPECT_THROW(build_wave_boundary_1d(N, 0.0, 0.0, 1.0), DomainError);
}

TEST(WaveBoundary, LeastDampedEigenvalueIsMeshConverged) {
  const double a50 = linalg::spectral_abscissa(build_wave_boundary_1d(50, 1.0, 0.0, 1.0).A);
  const double a100 = linalg::spectral_abscissa(build_wave_boundary_1d(100, 1.0, 0.0, 1.0).A);
  EXPECT_LE(std::abs(a100 - a50) / std::abs(a50), 0.02);
}

TEST(WaveInterface, SnappingAndSource) {
  const SnappedPoint p = snap_to_grid(0.5, 49);
  EXPECT_EQ(p.x, 0.5);
  EXPECT_EQ(p.error, 0.0);
  const DelaySystem s = build_wave_interface_1d(49, 0.5, 0.0, 1.0);
  EXPECT_LT(linalg::spectral_abscissa(s.A), 0.0);
  EXPECT_EQ((s.input_map.array() != 0.0).count(), 1);
  const Index n = s.layout->nodes;
  EXPECT_NE(s.input_map(n + p.node - 1, 0), 0.0);
  EXPECT_EQ(s.labels.at("snap_error"), "0");
  EXPECT_THROW(build_wave_interface_1d(49, 1.0, 0.0, 1.0), DomainError);
}

TEST(WaveDampedBoundary, StableForEveryDamping) {
  for (double alpha : {0.1, 1.0, 10.0}) {
    const DelaySystem s = build_wave_damped_boundary_delay_1d(50, alpha, 0.0, 1.0);
    EXPECT_LT(linalg::spectral_abscissa(s.A), -0.01) << alpha;
  }
  const DelaySystem s = build_wave_damped_boundary_delay_1d(50, 1.0, 0.0, 1.0);
  const Index n = s.layout->nodes;
  Vector U = Vector::Zero(s.dim());
  U[2 * n - 1] = -2.0;
  EXPECT_EQ(s.output(U)[0], -2.0);
  EXPECT_THROW(build_wave_damped_boundary_delay_1d(50, 0.0, 0.0, 1.0), DomainError);
}

TEST(WaveModels, StiffnessIsSymmetricPositiveDefinite) {
  for (const DelaySystem& s : {build_wave_internal_1d(30, 1.0, 0.0, 1.0, std::nullopt, {0, 1}, {0, 1}),
                               build_wave_boundary_1d(30, 1.0, 0.0, 1.0),
                               build_wave_interface_1d(30, 0.3, 0.0, 1.0),
                               build_wave_damped_boundary_delay_1d(30, 1.0, 0.0, 1.0)}) {
    const Matrix& K = s.layout->stiffness;
    EXPECT_EQ(K, K.transpose());
    EXPECT_EQ(Eigen::LLT<Matrix>(K).info(), Eigen::Success);
  }
}

TEST(PowerNonlinearity, ValuesAndSignLaw) {
  EXPECT_EQ(grad_G(Vector::Zero(5), 1.5), Vector::Zero(5));
  EXPECT_EQ(G_value(Vector::Zero(5), 1.5, Vector::Ones(5)), 0.0);
  EXPECT_EQ(grad_G(Vector::Constant(1, -1.0), 1.0)[0], -1.0);
  const WaveGrid g = WaveGrid::interior(999);
  // u = 1 on (0, 1): the interior nodes carry measure 1 - h.
  EXPECT_NEAR(G_value(Vector::Ones(999), 2.0, g.weights), 0.25, 1e-3);
}

TEST(PowerNonlinearity, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> beta_dist(0.5, 3.0);
  const WaveGrid g = WaveGrid::interior(30);
  for (int draw = 0; draw < 20; ++draw) {
    Vector u(30), v(30);
    for (int i = 0; i < 30; ++i) {
      u[i] = normal(rng);
      v[i] = normal(rng);
    }
    const double beta = beta_dist(rng);
    const double eps = 1e-6;
    const double fd = (G_value(u + eps * v, beta, g.weights) - G_value(u, beta, g.weights)) / eps;
    const double exact = grad_G(u, beta).cwiseProduct(g.weights).dot(v);
    EXPECT_LE(std::abs(fd - exact) / std::abs(exact), 1e-4);
  }
}
