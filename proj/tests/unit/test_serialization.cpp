#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <delaystab/certificates.hpp>
#include <delaystab/models.hpp>
#include <delaystab/serialization.hpp>
#include <delaystab/solver.hpp>

using namespace delaystab;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
}

TEST(MatrixJson, RowMajorRoundTrip) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const Json j = matrix_to_json(m);
  EXPECT_EQ(j["rows"], 2);
  EXPECT_EQ(j["data"][1], 2.0);
  EXPECT_EQ(matrix_from_json(j), m);
  Json bad = j;
  bad["data"].erase(0);
  EXPECT_THROW(matrix_from_json(bad), ConfigError);
}

TEST(SystemJson, RoundTripPreservesEveryField) {
  const DelaySystem s = build_wave_internal_1d(8, 1.0, 0.3, 0.7, 1.5, {0.0, 1.0}, {0.2, 0.6});
  const DelaySystem r = system_from_json(Json::parse(to_json(s).dump()));
  EXPECT_EQ(r.A, s.A);
  EXPECT_EQ(r.input_map, s.input_map);
  EXPECT_EQ(r.output_map, s.output_map);
  EXPECT_EQ(r.gram, s.gram);
  EXPECT_EQ(r.output_weights, s.output_weights);
  EXPECT_EQ(r.tau, s.tau);
  EXPECT_EQ(r.k, s.k);
  ASSERT_TRUE(r.nonlinearity);
  EXPECT_EQ(r.nonlinearity->beta, 1.5);
  ASSERT_TRUE(r.layout);
  EXPECT_EQ(r.layout->stiffness, s.layout->stiffness);
  EXPECT_EQ(r.labels, s.labels);
}

TEST(SystemJson, UnknownKeysAreRejected) {
  Json j = to_json(build_scalar(-1.0, 1.0, 0.5, 1.0));
  j["extra"] = 1;
  EXPECT_THROW(system_from_json(j), ConfigError);
}

TEST(HistoryAndTrajectoryJson, RoundTrip) {
  const History h = History::from_function(1.0, 16, [](double s) { return Vector::Constant(1, std::sin(s)); });
  const History hr = history_from_json(Json::parse(to_json(h).dump()));
  EXPECT_EQ(hr.tau(), h.tau());
  for (int j = 0; j <= 16; ++j) EXPECT_EQ(hr.sample(j), h.sample(j));

  const Trajectory t = solve_method_of_steps(build_scalar(-1.0, 1.0, 0.5, 1.0), Vector::Ones(1), h,
                                             {1.0 / 16, 3.0});
  const Trajectory tr = trajectory_from_json(Json::parse(to_json(t).dump()));
  EXPECT_EQ(tr.times, t.times);
  EXPECT_EQ(tr.norms, t.norms);
  ASSERT_EQ(tr.states.size(), t.states.size());
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(tr.states[i], t.states[i]);
  EXPECT_EQ(tr.steps_per_delay, t.steps_per_delay);
  EXPECT_EQ(tr.diverged, t.diverged);
}

TEST(CertificateJson, RoundTrip) {
  for (const StabilityCertificate& c :
       {bounded_certificate(1.3, 0.7, 2.0, 0.4, 0.1), unbounded_certificate(2.0, 0.5, 1.0, 0.3, 0.2, 0.6, 0.05)}) {
    const StabilityCertificate r = certificate_from_json(Json::parse(to_json(c).dump()));
    EXPECT_EQ(r.regime, c.regime);
    EXPECT_EQ(r.k0, c.k0);
    EXPECT_EQ(r.sigma, c.sigma);
    EXPECT_EQ(r.C4, c.C4);
    EXPECT_EQ(r.stable, c.stable);
  }
}

TEST(Csv, BoundReportColumns) {
  BoundReport r;
  r.samples = {{0.0, 1.0, 2.0, 0.5}, {0.5, 0.25, 1.0, 0.75}};
  std::ostringstream out;
  write_bound_report_csv(out, r);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "t,measured,envelope,slack");
  EXPECT_EQ(lines[2], "0.5,0.25,1,0.75");
}

TEST(Csv, DecayFitColumns) {
  const std::vector<DecayFit> fits{{2.0, 0.5, 0.0, 1.0, 3.0, 4}};
  std::ostringstream out;
  write_decay_fit_csv(out, fits);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "M_fit,rate_fit,residual,t0,t1,points");
  EXPECT_EQ(lines[1], "2,0.5,0,1,3,4");
}

TEST(Csv, TrajectoryWithStates) {
  Trajectory t;
  t.times = {0.0, 0.5};
  t.norms = {1.0, 0.5};
  t.states = {Vector::Constant(2, 1.0), Vector::Constant(2, 0.25)};
  std::ostringstream plain, full;
  write_trajectory_csv(plain, t);
  write_trajectory_csv(full, t, true);
  EXPECT_EQ(lines_of(plain.str())[0], "t,norm");
  EXPECT_EQ(lines_of(full.str())[0], "t,norm,state_0,state_1");
  EXPECT_EQ(lines_of(full.str())[2], "0.5,0.5,0.25,0.25");
  t.energies = {3.0, 2.0};
  std::ostringstream with_energy;
  write_trajectory_csv(with_energy, t);
  EXPECT_EQ(lines_of(with_energy.str())[1], "0,1,3");
}
