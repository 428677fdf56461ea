#include "delaystab/serialization.hpp"

#include <array>
#include <charconv>
#include <ostream>
#include <set>

namespace delaystab {

namespace {

void require_keys(const Json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError(std::string(what) + ": unknown key '" + item.key() + "'");
}

Json labels_to_json(const std::map<std::string, std::string>& labels) {
  Json j = Json::object();
  for (const auto& [key, value] : labels) j[key] = value;
  return j;
}

std::map<std::string, std::string> labels_from_json(const Json& j) {
  std::map<std::string, std::string> labels;
  for (const auto& item : j.items()) labels[item.key()] = item.value().get<std::string>();
  return labels;
}

Json vectors_to_json(const std::vector<Vector>& vs) {
  Json j = Json::array();
  for (const auto& v : vs) j.push_back(vector_to_json(v));
  return j;
}

std::vector<Vector> vectors_from_json(const Json& j) {
  std::vector<Vector> vs;
  for (const auto& item : j) vs.push_back(vector_from_json(item));
  return vs;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j) {
  require_keys(j, {"rows", "cols", "data"}, "matrix");
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const Json& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols))
    throw ConfigError("matrix: data length does not match rows * cols");
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = data[i++].get<double>();
  return m;
}

Json vector_to_json(const Vector& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ConfigError("vector: expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

Json to_json(const DelaySystem& s) {
  Json j;
  j["dim"] = s.dim();
  j["A"] = matrix_to_json(s.A);
  j["input_map"] = matrix_to_json(s.input_map);
  j["output_map"] = matrix_to_json(s.output_map);
  j["tau"] = s.tau;
  j["k"] = s.k;
  j["gram"] = matrix_to_json(s.gram);
  j["output_weights"] = vector_to_json(s.output_weights);
  if (s.nonlinearity)
    j["nonlinearity"] = {{"beta", s.nonlinearity->beta}, {"nodes", s.nonlinearity->nodes}};
  else
    j["nonlinearity"] = nullptr;
  if (s.layout)
    j["layout"] = {{"nodes", s.layout->nodes},
                   {"mass", vector_to_json(s.layout->mass)},
                   {"stiffness", matrix_to_json(s.layout->stiffness)}};
  else
    j["layout"] = nullptr;
  j["labels"] = labels_to_json(s.labels);
  return j;
}

DelaySystem system_from_json(const Json& j) {
  require_keys(j,
               {"dim", "A", "input_map", "output_map", "tau", "k", "gram", "output_weights",
                "nonlinearity", "layout", "labels"},
               "system");
  DelaySystem s;
  s.A = matrix_from_json(j.at("A"));
  s.input_map = matrix_from_json(j.at("input_map"));
  s.output_map = matrix_from_json(j.at("output_map"));
  s.tau = j.at("tau").get<double>();
  s.k = j.at("k").get<double>();
  if (j.contains("gram")) s.gram = matrix_from_json(j.at("gram"));
  if (j.contains("output_weights")) s.output_weights = vector_from_json(j.at("output_weights"));
  if (j.contains("nonlinearity") && !j.at("nonlinearity").is_null()) {
    const Json& n = j.at("nonlinearity");
    require_keys(n, {"beta", "nodes"}, "nonlinearity");
    s.nonlinearity = PowerNonlinearity{n.at("beta").get<double>(), n.at("nodes").get<Index>()};
  }
  if (j.contains("layout") && !j.at("layout").is_null()) {
    const Json& l = j.at("layout");
    require_keys(l, {"nodes", "mass", "stiffness"}, "layout");
    s.layout = SecondOrderLayout{l.at("nodes").get<Index>(), vector_from_json(l.at("mass")),
                                 matrix_from_json(l.at("stiffness"))};
  }
  if (j.contains("labels")) s.labels = labels_from_json(j.at("labels"));
  if (j.contains("dim") && j.at("dim").get<Index>() != s.dim())
    throw ConfigError("system: dim does not match A");
  return s;
}

Json to_json(const History& h) {
  return Json{{"tau", h.tau()}, {"m", h.subintervals()}, {"samples", vectors_to_json(h.samples())}};
}

History history_from_json(const Json& j) {
  require_keys(j, {"tau", "m", "samples"}, "history");
  History h(j.at("tau").get<double>(), vectors_from_json(j.at("samples")));
  if (j.contains("m") && j.at("m").get<int>() != h.subintervals())
    throw ConfigError("history: m does not match the number of samples");
  return h;
}

Json to_json(const Trajectory& t) {
  Json j;
  j["tau"] = t.tau;
  j["dt"] = t.dt;
  j["steps_per_delay"] = t.steps_per_delay;
  j["record_every"] = t.record_every;
  j["times"] = t.times;
  j["states"] = vectors_to_json(t.states);
  j["norms"] = t.norms;
  j["energies"] = t.energies;
  j["outputs"] = vectors_to_json(t.outputs);
  j["diverged"] = t.diverged;
  j["last_valid_time"] = t.last_valid_time;
  j["labels"] = labels_to_json(t.labels);
  return j;
}

Trajectory trajectory_from_json(const Json& j) {
  require_keys(j,
               {"tau", "dt", "steps_per_delay", "record_every", "times", "states", "norms",
                "energies", "outputs", "diverged", "last_valid_time", "labels"},
               "trajectory");
  Trajectory t;
  t.tau = j.at("tau").get<double>();
  t.dt = j.at("dt").get<double>();
  t.steps_per_delay = j.at("steps_per_delay").get<int>();
  t.record_every = j.at("record_every").get<int>();
  t.times = j.at("times").get<std::vector<double>>();
  t.states = vectors_from_json(j.at("states"));
  t.norms = j.at("norms").get<std::vector<double>>();
  t.energies = j.value("energies", std::vector<double>{});
  if (j.contains("outputs")) t.outputs = vectors_from_json(j.at("outputs"));
  t.diverged = j.value("diverged", false);
  t.last_valid_time = j.value("last_valid_time", 0.0);
  if (j.contains("labels")) t.labels = labels_from_json(j.at("labels"));
  if (t.states.size() != t.times.size() || t.norms.size() != t.times.size())
    throw ConfigError("trajectory: times, states and norms differ in length");
  return t;
}

Json to_json(const StabilityCertificate& c) {
  Json j;
  j["regime"] = to_string(c.regime);
  j["M"] = c.M;
  j["omega"] = c.omega;
  j["tau"] = c.tau;
  j["k"] = c.k;
  j["Bnorm"] = c.Bnorm;
  j["C1"] = c.C1;
  j["C2"] = c.C2;
  j["C3"] = c.C3;
  j["C4"] = c.C4;
  j["Mprime"] = c.Mprime;
  j["delta"] = c.delta;
  j["k0"] = c.k0;
  j["sigma"] = c.sigma;
  j["omega_prime"] = c.omega_prime;
  j["Mtilde"] = c.Mtilde;
  j["Mtilde_derivation"] = c.Mtilde_derivation;
  j["gamma"] = c.gamma;
  j["gamma_max"] = c.gamma_max;
  j["alpha"] = c.alpha;
  j["stable"] = c.stable;
  return j;
}

StabilityCertificate certificate_from_json(const Json& j) {
  require_keys(j,
               {"regime", "M", "omega", "tau", "k", "Bnorm", "C1", "C2", "C3", "C4", "Mprime",
                "delta", "k0", "sigma", "omega_prime", "Mtilde", "Mtilde_derivation", "gamma",
                "gamma_max", "alpha", "stable"},
               "certificate");
  StabilityCertificate c;
  c.regime = regime_from_string(j.at("regime").get<std::string>());
  c.M = j.value("M", c.M);
  c.omega = j.value("omega", c.omega);
  c.tau = j.value("tau", c.tau);
  c.k = j.value("k", c.k);
  c.Bnorm = j.value("Bnorm", c.Bnorm);
  c.C1 = j.value("C1", c.C1);
  c.C2 = j.value("C2", c.C2);
  c.C3 = j.value("C3", c.C3);
  c.C4 = j.value("C4", c.C4);
  c.Mprime = j.value("Mprime", c.Mprime);
  c.delta = j.value("delta", c.delta);
  c.k0 = j.value("k0", c.k0);
  c.sigma = j.value("sigma", c.sigma);
  c.omega_prime = j.value("omega_prime", c.omega_prime);
  c.Mtilde = j.value("Mtilde", c.Mtilde);
  c.Mtilde_derivation = j.value("Mtilde_derivation", c.Mtilde_derivation);
  c.gamma = j.value("gamma", c.gamma);
  c.gamma_max = j.value("gamma_max", c.gamma_max);
  c.alpha = j.value("alpha", c.alpha);
  c.stable = j.value("stable", c.stable);
  return c;
}

Json to_json(const SemigroupEstimate& e) {
  return Json{{"M", e.M}, {"omega", e.omega}, {"margin", e.margin}};
}

Json to_json(const BoundReport& r, bool include_samples) {
  Json j;
  j["worst_slack"] = r.worst_slack;
  j["violated"] = r.violated;
  j["tolerance"] = r.tolerance;
  j["samples_checked"] = r.samples.size();
  j["constants"] = to_json(r.constants);
  if (include_samples) {
    Json rows = Json::array();
    for (const auto& s : r.samples)
      rows.push_back({{"t", s.t}, {"measured", s.measured}, {"envelope", s.envelope},
                      {"slack", s.slack}});
    j["samples"] = std::move(rows);
  }
  return j;
}

Json to_json(const DecayFit& f) {
  return Json{{"M_fit", f.M_fit}, {"rate_fit", f.rate_fit}, {"residual", f.residual},
              {"t0", f.t0},       {"t1", f.t1},             {"points", f.points}};
}

void write_bound_report_csv(std::ostream& out, const BoundReport& report) {
  out << "t,measured,envelope,slack\n";
  for (const auto& s : report.samples)
    out << format_double(s.t) << ',' << format_double(s.measured) << ','
        << format_double(s.envelope) << ',' << format_double(s.slack) << '\n';
}

void write_decay_fit_csv(std::ostream& out, std::span<const DecayFit> fits) {
  out << "M_fit,rate_fit,residual,t0,t1,points\n";
  for (const auto& f : fits)
    out << format_double(f.M_fit) << ',' << format_double(f.rate_fit) << ','
        << format_double(f.residual) << ',' << format_double(f.t0) << ',' << format_double(f.t1)
        << ',' << f.points << '\n';
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t, bool include_states) {
  const bool with_energy = !t.energies.empty();
  const Index d = include_states && !t.states.empty() ? t.states.front().size() : 0;
  out << "t,norm";
  if (with_energy) out << ",energy";
  for (Index i = 0; i < d; ++i) out << ",state_" << i;
  out << '\n';
  for (std::size_t n = 0; n < t.size(); ++n) {
    out << format_double(t.times[n]) << ',' << format_double(t.norms[n]);
    if (with_energy) out << ',' << format_double(t.energies[n]);
    for (Index i = 0; i < d; ++i) out << ',' << format_double(t.states[n][i]);
    out << '\n';
  }
}

}  // namespace delaystab
