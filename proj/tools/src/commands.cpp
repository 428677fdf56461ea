#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include <delaystab/certificates.hpp>
#include <delaystab/linalg.hpp>
#include <delaystab/models.hpp>
#include <delaystab/solver.hpp>

namespace delaystab::cli {

namespace {

constexpr int kSemigroupSamples = 400;

bool unbounded_model(const ExperimentConfig& c) {
  return c.model == "wave-boundary-1d" || c.model == "wave-interface-1d" ||
         c.model == "wave-damped-boundary-1d";
}

int history_subintervals(const ExperimentConfig& c) {
  SolverConfig probe;
  probe.dt = effective_dt(c);
  return steps_per_delay(probe, c.tau);
}

SolverConfig solver_config(const ExperimentConfig& c) {
  SolverConfig s;
  s.dt = effective_dt(c);
  s.horizon = c.horizon;
  s.integrator = integrator_from_string(c.integrator);
  s.record_every = c.record_every;
  s.blowup_guard = c.blowup_guard;
  return s;
}

std::ofstream open_output(const std::string& path, const char* key) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + std::string(key) + "' file '" + path + "'");
  return out;
}

void write_json_file(const ExperimentConfig& c, const Json& j) {
  if (c.output_json.empty()) return;
  auto out = open_output(c.output_json, "output_json");
  out << j.dump(2) << '\n';
}

Json nullable(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

}  // namespace

DelaySystem build_model(const ExperimentConfig& c, double k) {
  if (c.model == "scalar") return build_scalar(c.lambda, c.b, k, c.tau);
  if (c.model == "linear-toy") return build_linear_toy(c.spectrum, c.seed, c.Bnorm_target, k, c.tau);
  if (c.model == "wave-internal-1d")
    return build_wave_internal_1d(c.N, c.a, k, c.tau, c.beta, {c.omega1[0], c.omega1[1]},
                                  {c.omega2[0], c.omega2[1]});
  if (c.model == "wave-boundary-1d") return build_wave_boundary_1d(c.N, c.a, k, c.tau, c.viscosity);
  if (c.model == "wave-interface-1d")
    return build_wave_interface_1d(c.N, c.a_point, k, c.tau, c.viscosity);
  if (c.model == "wave-damped-boundary-1d")
    return build_wave_damped_boundary_delay_1d(c.N, c.damping, k, c.tau, c.viscosity);
  throw ConfigError("invalid 'model': unknown model '" + c.model + "'");
}

Vector initial_state(const ExperimentConfig& c, const DelaySystem& system) {
  const Index d = system.dim();
  Vector U0(d);
  if (c.initial == "ones") {
    U0.setOnes();
  } else if (c.initial == "smooth" && system.layout) {
    // u = sin(pi x), v = sin(2 pi x) sampled at node positions j / (nodes + 1)
    const Index n = system.layout->nodes;
    for (Index i = 0; i < n; ++i) {
      const double x = static_cast<double>(i + 1) / static_cast<double>(n + 1);
      U0[i] = std::sin(std::numbers::pi * x);
      U0[n + i] = std::sin(2.0 * std::numbers::pi * x);
    }
  } else if (c.initial == "smooth") {
    U0.setOnes();
  } else {
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < d; ++i) U0[i] = normal(rng);
  }
  return c.initial_scale * U0;
}

History initial_history(const ExperimentConfig& c, const DelaySystem& system) {
  const int m = history_subintervals(c);
  const Index p = system.channels();
  if (c.history == "zero") return History::constant(c.tau, m, Vector::Zero(p));
  if (c.history == "constant") return History::constant(c.tau, m, Vector::Constant(p, c.history_value));
  return History::from_function(c.tau, m, [&](double s) {
    return Vector::Constant(p, c.history_value * std::cos(2.0 * std::numbers::pi * s / c.tau));
  });
}

ModelConstants resolve_constants(const ExperimentConfig& c) {
  ModelConstants k;
  const bool given_bounded = c.Bnorm.has_value();
  const bool given_unbounded = c.C1 || c.C2 || c.C3;
  if (given_bounded && given_unbounded)
    throw ConfigError("invalid 'Bnorm': give either Bnorm or C1/C2/C3, not both");
  if (given_unbounded)
    k.regime = Regime::UnboundedLinear;
  else if (given_bounded)
    k.regime = Regime::BoundedLinear;
  else
    k.regime = unbounded_model(c) ? Regime::UnboundedLinear : Regime::BoundedLinear;

  if (c.estimate) {
    const DelaySystem system = build_model(c, 0.0);
    const double abscissa = linalg::spectral_abscissa(system.A);
    if (!(abscissa < 0.0))
      throw DomainError("model generator is not exponentially stable; cannot estimate M, omega");
    const double omega = (1.0 - c.margin) * (-abscissa);
    k.semigroup = estimate_semigroup_constants(
        system.A, default_semigroup_horizon(omega, c.margin), kSemigroupSamples, c.margin, system.gram);
    if (k.regime == Regime::UnboundedLinear) {
      const AdmissibilityEstimate adm = estimate_admissibility(system, c.tau, c.admissibility_grid);
      k.C1 = adm.C1;
      k.C2 = adm.C2;
      k.C3 = adm.C3;
    } else {
      k.Bnorm = delay_operator_norm(system);
    }
    k.estimated = true;
  }
  if (c.M) k.semigroup.M = *c.M;
  if (c.omega) k.semigroup.omega = *c.omega;
  k.semigroup.margin = c.margin;
  if (c.Bnorm) k.Bnorm = *c.Bnorm;
  if (c.C1) k.C1 = *c.C1;
  if (c.C2) k.C2 = *c.C2;
  if (c.C3) k.C3 = *c.C3;

  auto need = [&](bool ok, const char* key) {
    if (!ok) throw ConfigError("missing '" + std::string(key) + "' (give it or pass --estimate)");
  };
  need(c.M || c.estimate, "M");
  need(c.omega || c.estimate, "omega");
  if (k.regime == Regime::UnboundedLinear) {
    need(c.C1 || c.estimate, "C1");
    need(c.C2 || c.estimate, "C2");
    need(c.C3 || c.estimate, "C3");
  } else {
    need(c.Bnorm || c.estimate, "Bnorm");
  }
  return k;
}

StabilityCertificate make_certificate(const ModelConstants& constants, const ExperimentConfig& c,
                                      double k) {
  const SemigroupEstimate& s = constants.semigroup;
  if (constants.regime == Regime::UnboundedLinear)
    return unbounded_certificate(s.M, s.omega, c.tau, constants.C1, constants.C2, constants.C3, k);
  StabilityCertificate cert = bounded_certificate(s.M, s.omega, c.tau, constants.Bnorm, k);
  if (c.model == "wave-internal-1d" && c.beta) {
    const double Mtilde = tilde_M_estimate(s.M, constants.Bnorm, c.tau, cert.omega_prime);
    cert = semilinear_certificate(cert, Mtilde, c.gamma.value_or(0.0),
                                  "M' sqrt(1 + B^2 h^2) composed from the transport semigroup");
  }
  return cert;
}

RunResult run_single(const ExperimentConfig& c, double k,
                     const std::optional<ModelConstants>& constants) {
  RunResult r;
  r.k = k;
  const DelaySystem system = build_model(c, k);
  const Vector U0 = initial_state(c, system);
  const History history = initial_history(c, system);
  const SolverConfig solver = solver_config(c);

  if (c.solver == "duhamel")
    r.trajectory = duhamel_oracle(system, U0, history, c.horizon, c.gauss_points);
  else if (c.solver == "transport")
    r.trajectory = solve_transport_augmented(system, U0, history, solver, c.n_rho);
  else
    r.trajectory = solve_method_of_steps(system, U0, history, solver);

  Trajectory& t = r.trajectory;
  if (system.layout && c.solver == "method-of-steps" && c.record_every == 1 && !t.diverged) {
    t.energies = energy_series(system, t, history);
    r.energy_violations =
        energy_monotone_check(t.energies, 1e-10 * std::abs(t.energies.front())).size();
  }

  const double t_end = t.diverged ? t.last_valid_time : c.horizon;
  const double t0 = c.fit_t0.value_or(0.5 * t_end);
  const double t1 = c.fit_t1.value_or(t_end);
  try {
    if (t1 > t0) r.fit = fit_decay_rate(t, t0, t1);
  } catch (const DomainError&) {
    r.fit.reset();
  }

  r.U0_norm = system.norm(U0);
  if (constants) {
    r.certificate = make_certificate(*constants, c, k);
    r.alpha = r.certificate->regime == Regime::UnboundedLinear
                  ? history_l2_norm(history, system.output_weights)
                  : history_weight_alpha(history, r.certificate->omega, system.output_weights);
    r.certificate->alpha = r.alpha;
    if (system.linear())
      r.bound = verify_iterative_bound(t, *r.certificate, r.U0_norm, r.alpha, c.tolerance,
                                       constants->semigroup);
  }
  return r;
}

Json summary_json(const ExperimentConfig& c, const RunResult& r) {
  Json j;
  j["model"] = c.model;
  j["k"] = r.k;
  j["solver"] = c.solver;
  j["integrator"] = c.integrator;
  j["dt"] = effective_dt(c);
  j["horizon"] = c.horizon;
  j["samples"] = r.trajectory.size();
  j["diverged"] = r.trajectory.diverged;
  j["last_valid_time"] = r.trajectory.last_valid_time;
  j["rate_fit"] = nullable(r.fit ? std::optional<double>(r.fit->rate_fit) : std::nullopt);
  j["fit_residual"] = nullable(r.fit ? std::optional<double>(r.fit->residual) : std::nullopt);
  j["fit_window"] = r.fit ? Json{r.fit->t0, r.fit->t1} : Json(nullptr);
  std::optional<double> guaranteed;
  if (r.certificate) guaranteed = r.certificate->omega_prime;
  j["certified"] = r.certificate ? Json(r.certificate->stable) : Json(nullptr);
  j["k0"] = nullable(r.certificate ? std::optional<double>(r.certificate->k0) : std::nullopt);
  j["guaranteed_rate"] = nullable(guaranteed);
  j["margin_rate"] = nullable(r.fit && guaranteed
                                  ? std::optional<double>(r.fit->rate_fit - *guaranteed)
                                  : std::nullopt);
  j["energy_checked"] = r.energy_violations.has_value();
  j["energy_violations"] = r.energy_violations ? Json(*r.energy_violations) : Json(nullptr);
  j["energy_monotone"] =
      r.energy_violations ? Json(*r.energy_violations == 0) : Json(nullptr);
  j["bound"] = r.bound ? to_json(*r.bound) : Json(nullptr);
  return j;
}

int cmd_certify(const ExperimentConfig& c, std::ostream& out) {
  validate_config(c);
  const ModelConstants constants = resolve_constants(c);
  Json records = Json::array();
  bool all_stable = true;
  for (double k : k_values(c)) {
    const StabilityCertificate cert = make_certificate(constants, c, k);
    Json rec = to_json(cert);
    rec["model"] = c.model;
    rec["estimated"] = constants.estimated;
    if (cert.regime == Regime::BoundedSemilinear && c.beta) {
      const DelaySystem system = build_model(c, k);
      const double C_psi = psi_constant(*system.layout, *c.beta);
      const SmallnessRadius rho = smallness_radius(C_psi, *c.beta, std::max(cert.omega_prime, 0.0),
                                                   cert.Mtilde);
      rec["C_psi"] = C_psi;
      rec["rho0"] = rho.rho0;
    }
    out << rec.dump() << '\n';
    all_stable = all_stable && cert.stable;
    records.push_back(std::move(rec));
  }
  write_json_file(c, records);
  return all_stable ? kExitOk : kExitUnstable;
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& out) {
  validate_config(c);
  const auto ks = k_values(c);
  if (ks.size() != 1) throw ConfigError("invalid 'k': simulate takes one gain (use sweep)");
  std::optional<ModelConstants> constants;
  if (c.estimate || c.M) constants = resolve_constants(c);
  const RunResult r = run_single(c, ks.front(), constants);
  if (!c.output_csv.empty()) {
    auto csv = open_output(c.output_csv, "output_csv");
    write_trajectory_csv(csv, r.trajectory, c.include_states);
  }
  Json summary = summary_json(c, r);
  out << summary.dump(2) << '\n';
  write_json_file(c, summary);
  return r.trajectory.diverged ? kExitDiverged : kExitOk;
}

int cmd_sweep(const ExperimentConfig& c, std::ostream& out) {
  validate_config(c);
  const auto ks = k_values(c);
  std::optional<ModelConstants> constants;
  if (c.estimate || c.M) constants = resolve_constants(c);

  std::vector<RunResult> rows(ks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ks.size(); i = next++) {
      try {
        rows[i] = run_single(c, ks[i], constants);
      } catch (const std::exception& e) {
        rows[i] = RunResult{};
        rows[i].k = ks[i];
        rows[i].error = e.what();
      }
    }
  };
  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(c.workers), ks.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  Json table = Json::array();
  for (const auto& r : rows) {
    Json row = summary_json(c, r);
    row.erase("bound");
    row["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
    table.push_back(std::move(row));
  }
  if (!c.output_csv.empty()) {
    auto csv = open_output(c.output_csv, "output_csv");
    csv << "k,certified,k0,guaranteed_rate,rate_fit,diverged,last_valid_time,error\n";
    auto cell = [](const Json& v) {
      if (v.is_null()) return std::string();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      if (v.is_number()) return format_double(v.get<double>());
      return v.get<std::string>();
    };
    for (const auto& row : table)
      csv << cell(row["k"]) << ',' << cell(row["certified"]) << ',' << cell(row["k0"]) << ','
          << cell(row["guaranteed_rate"]) << ',' << cell(row["rate_fit"]) << ','
          << cell(row["diverged"]) << ',' << cell(row["last_valid_time"]) << ','
          << '"' << cell(row["error"]) << '"' << '\n';
  }
  Json summary{{"command", "sweep"}, {"model", c.model}, {"rows", table}};
  out << summary.dump(2) << '\n';
  write_json_file(c, summary);
  return kExitOk;
}

int cmd_verify_bounds(const ExperimentConfig& c, std::ostream& out) {
  validate_config(c);
  const auto ks = k_values(c);
  const ModelConstants constants = resolve_constants(c);
  Json reports = Json::array();
  bool violated = false;
  bool diverged = false;
  for (double k : ks) {
    const RunResult r = run_single(c, k, constants);
    if (!r.bound) throw UnsupportedRegime("bound verification needs a linear model");
    Json rec{{"model", c.model},
             {"k", k},
             {"certificate", to_json(*r.certificate)},
             {"U0_norm", r.U0_norm},
             {"alpha", r.alpha},
             {"diverged", r.trajectory.diverged},
             {"report", to_json(*r.bound)}};
    out << rec.dump() << '\n';
    violated = violated || r.bound->violated;
    diverged = diverged || r.trajectory.diverged;
    rec["report"] = to_json(*r.bound, true);
    reports.push_back(std::move(rec));
  }
  write_json_file(c, reports);
  if (violated) return kExitUnstable;
  return diverged ? kExitDiverged : kExitOk;
}

int cmd_scan_reflection(const ExperimentConfig& c, std::ostream& out) {
  validate_config(c);
  const bool table = !c.output_csv.empty();
  std::ofstream csv;
  if (table) {
    csv = open_output(c.output_csv, "output_csv");
    csv << "a,xi,abs_c\n";
  }
  Json records = Json::array();
  for (double a : c.reflection_a) {
    if (!(a > 0.0)) throw ConfigError("invalid 'reflection_a': values must be positive");
    const ReflectionScan scan = sup_scan(a, c.xi_min, c.xi_max, c.xi_step, table);
    Json rec{{"a", a},
             {"sup", scan.sup},
             {"argmax", scan.argmax},
             {"min_denominator", scan.min_denominator},
             {"finite", std::isfinite(scan.sup)},
             {"abs_c_near_zero", std::abs(reflection_coefficient(1e-12, a))},
             {"abs_c_half_pi", std::abs(reflection_coefficient(std::numbers::pi / 2.0, a))}};
    out << rec.dump() << '\n';
    records.push_back(std::move(rec));
    for (const auto& [xi, mag] : scan.table)
      csv << format_double(a) << ',' << format_double(xi) << ',' << format_double(mag) << '\n';
  }
  write_json_file(c, records);
  return kExitOk;
}

}  // namespace delaystab::cli
