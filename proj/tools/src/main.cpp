#include <functional>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using delaystab::cli::ExperimentConfig;
using Applier = std::function<void(ExperimentConfig&)>;

/// Registers one flag per config key on a subcommand. Parsed flags are applied
/// on top of the --config file (or the defaults), so a flag always wins.
class FlagBinder {
 public:
  explicit FlagBinder(CLI::App& app) : app_(app) {}

  template <class T>
  void value(const std::string& flag, T ExperimentConfig::*member, const std::string& help) {
    auto holder = std::make_shared<T>();
    CLI::Option* opt = app_.add_option(flag, *holder, help);
    if constexpr (std::is_same_v<T, std::vector<double>>) opt->delimiter(',');
    appliers_.push_back([opt, holder, member](ExperimentConfig& c) {
      if (opt->count() > 0) c.*member = *holder;
    });
  }

  void optional(const std::string& flag, std::optional<double> ExperimentConfig::*member,
                const std::string& help) {
    auto holder = std::make_shared<double>();
    CLI::Option* opt = app_.add_option(flag, *holder, help);
    appliers_.push_back([opt, holder, member](ExperimentConfig& c) {
      if (opt->count() > 0) c.*member = *holder;
    });
  }

  void flag(const std::string& name, bool ExperimentConfig::*member, const std::string& help) {
    auto holder = std::make_shared<bool>(false);
    CLI::Option* opt = app_.add_flag(name, *holder, help);
    appliers_.push_back([opt, holder, member](ExperimentConfig& c) {
      if (opt->count() > 0) c.*member = *holder;
    });
  }

  void k_grid(const std::string& flag, const std::string& help) {
    auto holder = std::make_shared<std::vector<double>>();
    CLI::Option* opt = app_.add_option(flag, *holder, help)->delimiter(',')->expected(3);
    appliers_.push_back([opt, holder](ExperimentConfig& c) {
      if (opt->count() == 0) return;
      if (holder->size() != 3)
        throw delaystab::ConfigError("invalid 'k_grid': expected start,stop,step");
      c.k_grid = delaystab::cli::KGrid{(*holder)[0], (*holder)[1], (*holder)[2]};
    });
  }

  ExperimentConfig resolve(const std::string& config_path) const {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{}
                                             : delaystab::cli::load_config(config_path);
    for (const auto& apply : appliers_) apply(c);
    return c;
  }

 private:
  CLI::App& app_;
  std::vector<Applier> appliers_;
};

void bind_config_flags(FlagBinder& b) {
  using C = ExperimentConfig;
  b.value("--model", &C::model, "Model name");
  b.value("--N", &C::N, "Interior grid nodes");
  b.value("--a", &C::a, "Damping gain (internal) or boundary stiffness (boundary model)");
  b.value("--a-point", &C::a_point, "Interface location in (0, 1)");
  b.value("--damping", &C::damping, "Interior damping of the damped boundary-delay model");
  b.optional("--beta", &C::beta, "Power nonlinearity exponent (internal model)");
  b.value("--omega1", &C::omega1, "Damping subinterval lo,hi");
  b.value("--omega2", &C::omega2, "Delay subinterval lo,hi");
  b.value("--lambda", &C::lambda, "Scalar model rate");
  b.value("--b", &C::b, "Scalar model delay coefficient");
  b.value("--spectrum", &C::spectrum, "Linear toy eigenvalues (comma separated)");
  b.value("--Bnorm-target", &C::Bnorm_target, "Linear toy delay operator norm");
  b.value("--viscosity", &C::viscosity, "Mesh viscosity of the boundary-feedback models");
  b.value("--tau", &C::tau, "Delay");
  b.value("--k", &C::k, "Feedback gain(s), comma separated");
  b.k_grid("--k-grid", "Gain grid start,stop,step");
  b.optional("--M", &C::M, "Semigroup overshoot constant");
  b.optional("--omega", &C::omega, "Semigroup decay rate");
  b.optional("--Bnorm", &C::Bnorm, "Norm of the bounded delay operator");
  b.optional("--C1", &C::C1, "Admissibility constant of the input map");
  b.optional("--C2", &C::C2, "Admissibility constant of the output map");
  b.optional("--C3", &C::C3, "Input-output admissibility constant");
  b.optional("--gamma", &C::gamma, "Lipschitz constant of the nonlinearity");
  b.flag("--estimate", &C::estimate, "Estimate missing constants from the model");
  b.value("--margin", &C::margin, "Fraction of the spectral gap conceded in omega");
  b.value("--admissibility-grid", &C::admissibility_grid, "Quadrature intervals for C1, C2, C3");
  b.value("--solver", &C::solver, "method-of-steps, duhamel or transport");
  b.value("--dt", &C::dt, "Time step (must divide tau); 0 selects tau/128");
  b.value("--horizon", &C::horizon, "Final time");
  b.value("--integrator", &C::integrator, "rk4 or implicit-midpoint");
  b.value("--record-every", &C::record_every, "Record every n-th step");
  b.value("--blowup-guard", &C::blowup_guard, "Norm above which a run counts as diverged");
  b.value("--n-rho", &C::n_rho, "Transport cells");
  b.value("--gauss-points", &C::gauss_points, "Gauss points per sub-interval (duhamel)");
  b.value("--initial", &C::initial, "random, ones or smooth");
  b.value("--initial-scale", &C::initial_scale, "Scale of the initial state");
  b.value("--history", &C::history, "zero, constant or cosine");
  b.value("--history-value", &C::history_value, "Amplitude of the history");
  b.value("--seed", &C::seed, "Random seed");
  b.optional("--fit-t0", &C::fit_t0, "Start of the decay fit window");
  b.optional("--fit-t1", &C::fit_t1, "End of the decay fit window");
  b.value("--tolerance", &C::tolerance, "Relative slack tolerance of the bound check");
  b.value("--reflection-a", &C::reflection_a, "Boundary stiffness values to scan");
  b.value("--xi-min", &C::xi_min, "Scan start");
  b.value("--xi-max", &C::xi_max, "Scan end");
  b.value("--xi-step", &C::xi_step, "Scan step");
  b.value("--output-csv", &C::output_csv, "CSV output path");
  b.value("--output-json", &C::output_json, "JSON output path");
  b.flag("--include-states", &C::include_states, "Add state columns to the trajectory CSV");
  b.value("--workers", &C::workers, "Concurrent sweep workers");
}

using Command = int (*)(const ExperimentConfig&, std::ostream&);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability certificates and simulations for delayed feedback systems"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    Command run;
  };
  const Entry entries[] = {
      {"certify", "Closed-form threshold k0 and decay rate per gain",
       delaystab::cli::cmd_certify},
      {"simulate", "Simulate one gain; trajectory CSV plus summary JSON",
       delaystab::cli::cmd_simulate},
      {"sweep", "Simulate a grid of gains; one summary row per gain", delaystab::cli::cmd_sweep},
      {"verify-bounds", "Check a simulation against the iterative envelope",
       delaystab::cli::cmd_verify_bounds},
      {"scan-reflection", "Supremum of the boundary reflection coefficient",
       delaystab::cli::cmd_scan_reflection},
  };

  std::vector<std::unique_ptr<FlagBinder>> binders;
  std::vector<std::string> config_paths(std::size(entries));
  std::vector<bool> dump(std::size(entries), false);
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    CLI::App* sub = app.add_subcommand(entries[i].name, entries[i].help);
    sub->add_option("--config", config_paths[i], "JSON config file; flags override its keys");
    sub->add_flag("--dump-config", [&dump, i](std::int64_t) { dump[i] = true; },
                  "Print the effective config as JSON and exit");
    binders.push_back(std::make_unique<FlagBinder>(*sub));
    bind_config_flags(*binders.back());
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : delaystab::cli::kExitInvalid;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      const ExperimentConfig config = binders[i]->resolve(config_paths[i]);
      if (dump[i]) {
        std::cout << delaystab::cli::to_json(config).dump(2) << '\n';
        return delaystab::cli::kExitOk;
      }
      return entries[i].run(config, std::cout);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return delaystab::cli::kExitInvalid;
    }
  }
  return delaystab::cli::kExitInvalid;
}
