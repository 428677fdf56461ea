#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

namespace delaystab::cli {

namespace {

const std::set<std::string> kModels{"scalar",           "linear-toy",        "wave-internal-1d",
                                    "wave-boundary-1d", "wave-interface-1d", "wave-damped-boundary-1d"};
const std::set<std::string> kSolvers{"method-of-steps", "duhamel", "transport"};
const std::set<std::string> kInitial{"random", "ones", "smooth"};
const std::set<std::string> kHistories{"zero", "constant", "cosine"};

template <class T>
void put(Json& j, const char* key, const std::optional<T>& value) {
  if (value)
    j[key] = *value;
  else
    j[key] = nullptr;
}

template <class T>
void get(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    if constexpr (std::is_same_v<T, std::optional<double>>) {
      out = j.at(key).is_null() ? std::nullopt : std::optional<double>(j.at(key).get<double>());
    } else if constexpr (std::is_same_v<T, std::optional<KGrid>>) {
      const Json& g = j.at(key);
      if (g.is_null()) {
        out.reset();
      } else {
        for (const auto& item : g.items())
          if (item.key() != "start" && item.key() != "stop" && item.key() != "step")
            throw ConfigError("unknown key '" + std::string(key) + "." + item.key() + "'");
        out = KGrid{g.at("start").get<double>(), g.at("stop").get<double>(),
                    g.at("step").get<double>()};
      }
    } else {
      out = j.at(key).get<T>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid value for key '" + std::string(key) + "': " + e.what());
  }
}

void check(bool ok, const std::string& key, const std::string& rule) {
  if (!ok) throw ConfigError("invalid '" + key + "': " + rule);
}

}  // namespace

#define DELAYSTAB_CONFIG_FIELDS(X)                                                           \
  X(model) X(N) X(a) X(a_point) X(damping) X(beta) X(omega1) X(omega2) X(lambda) X(b)        \
  X(spectrum) X(Bnorm_target) X(viscosity) X(tau) X(k) X(k_grid) X(M) X(omega) X(Bnorm)      \
  X(C1) X(C2) X(C3) X(gamma) X(estimate) X(margin) X(admissibility_grid) X(solver) X(dt)     \
  X(horizon) X(integrator) X(record_every) X(blowup_guard) X(n_rho) X(gauss_points)          \
  X(initial) X(initial_scale) X(history) X(history_value) X(seed) X(fit_t0) X(fit_t1)        \
  X(tolerance) X(reflection_a) X(xi_min) X(xi_max) X(xi_step) X(output_csv) X(output_json)   \
  X(include_states) X(workers)

Json to_json(const ExperimentConfig& c) {
  Json j = Json::object();
  auto emit = [&j](const char* key, const auto& value) {
    using T = std::decay_t<decltype(value)>;
    if constexpr (std::is_same_v<T, std::optional<KGrid>>) {
      if (value)
        j[key] = {{"start", value->start}, {"stop", value->stop}, {"step", value->step}};
      else
        j[key] = nullptr;
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
      put(j, key, value);
    } else {
      j[key] = value;
    }
  };
#define X(field) emit(#field, c.field);
  DELAYSTAB_CONFIG_FIELDS(X)
#undef X
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{
#define X(field) #field,
      DELAYSTAB_CONFIG_FIELDS(X)
#undef X
  };
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw ConfigError("unknown key '" + item.key() + "'");
  ExperimentConfig c;
#define X(field) get(j, #field, c.field);
  DELAYSTAB_CONFIG_FIELDS(X)
#undef X
  return c;
}

#undef DELAYSTAB_CONFIG_FIELDS

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void validate_config(const ExperimentConfig& c) {
  check(kModels.count(c.model) > 0, "model", "unknown model '" + c.model + "'");
  check(kSolvers.count(c.solver) > 0, "solver", "unknown solver '" + c.solver + "'");
  check(kInitial.count(c.initial) > 0, "initial", "unknown initial data '" + c.initial + "'");
  check(kHistories.count(c.history) > 0, "history", "unknown history '" + c.history + "'");
  check(c.integrator == "rk4" || c.integrator == "implicit-midpoint", "integrator",
        "expected rk4 or implicit-midpoint");
  check(c.N >= 3, "N", "must be at least 3");
  check(c.tau > 0.0 && std::isfinite(c.tau), "tau", "must be positive");
  check(c.dt >= 0.0, "dt", "must be nonnegative");
  check(c.horizon >= 0.0, "horizon", "must be nonnegative");
  check(c.record_every >= 1, "record_every", "must be at least 1");
  check(c.n_rho >= 8, "n_rho", "must be at least 8");
  check(c.gauss_points >= 1, "gauss_points", "must be at least 1");
  check(c.workers >= 1, "workers", "must be at least 1");
  check(c.admissibility_grid >= 2, "admissibility_grid", "must be at least 2");
  check(c.margin >= 0.0 && c.margin < 1.0, "margin", "must lie in [0, 1)");
  check(c.omega1.size() == 2 && c.omega1[0] < c.omega1[1], "omega1", "expected [lo, hi]");
  check(c.omega2.size() == 2 && c.omega2[0] < c.omega2[1], "omega2", "expected [lo, hi]");
  check(!c.spectrum.empty(), "spectrum", "must be nonempty");
  check(c.xi_step > 0.0 && c.xi_max >= c.xi_min, "xi_step", "scan grid is empty");
  check(c.tolerance >= 0.0, "tolerance", "must be nonnegative");
  if (c.k_grid) {
    check(c.k_grid->step > 0.0, "k_grid", "step must be positive");
    check(c.k_grid->stop >= c.k_grid->start, "k_grid", "stop must not precede start");
  }
  check(!k_values(c).empty(), "k", "no gain values given");
  for (double k : k_values(c)) check(std::isfinite(k), "k", "values must be finite");
}

std::vector<double> k_values(const ExperimentConfig& c) {
  std::vector<double> ks = c.k;
  if (c.k_grid && c.k_grid->step > 0.0) {
    const auto count =
        static_cast<long>(std::floor((c.k_grid->stop - c.k_grid->start) / c.k_grid->step + 1e-9));
    // 12 significant digits strip the representation error of start + i step
    for (long i = 0; i <= count; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", c.k_grid->start + static_cast<double>(i) * c.k_grid->step);
      ks.push_back(std::strtod(buf, nullptr));
    }
  }
  if (ks.empty() && !c.k_grid) ks.push_back(0.0);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

double effective_dt(const ExperimentConfig& c) { return c.dt > 0.0 ? c.dt : c.tau / 128.0; }

}  // namespace delaystab::cli
