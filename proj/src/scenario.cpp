#include "qanalysis/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "qanalysis/dissipative.hpp"
#include "qanalysis/equilibrium_response.hpp"
#include "qanalysis/hyperop.hpp"
#include "qanalysis/json_io.hpp"
#include "qanalysis/nonequilibrium.hpp"
#include "qanalysis/taylor.hpp"
#include "qanalysis/verify/acceptance.hpp"
#include "qanalysis/verify/instances.hpp"

#ifndef QA_VERSION
#define QA_VERSION "unknown"
#endif

namespace qa {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---- schema ---------------------------------------------------------------

enum class FieldType {
  number,
  integer,
  string,
  boolean,
  op_ref,
  number_list,
  integer_list,
  string_list,
  block
};

struct Field {
  std::string name;
  FieldType type;
  json def;  // null: optional without default
  std::string doc;
  std::vector<std::string> choices = {};
  std::optional<double> minimum = {};
  bool exclusive = false;
  std::vector<Field> children = {};
};

Field num(std::string n, double def, std::string doc, std::optional<double> min = {},
          bool exclusive = false) {
  return {std::move(n), FieldType::number, def, std::move(doc), {}, min, exclusive};
}
Field integer(std::string n, json def, std::string doc, std::optional<double> min = {}) {
  return {std::move(n), FieldType::integer, std::move(def), std::move(doc), {}, min};
}
Field str(std::string n, json def, std::string doc, std::vector<std::string> choices = {}) {
  return {std::move(n), FieldType::string, std::move(def), std::move(doc), std::move(choices)};
}
Field op(std::string n, json def, std::string doc) {
  return {std::move(n), FieldType::op_ref, std::move(def), std::move(doc)};
}
Field block(std::string n, std::string doc, std::vector<Field> children) {
  Field f{std::move(n), FieldType::block, json::object(), std::move(doc)};
  f.children = std::move(children);
  return f;
}

const char* kOpDoc =
    "operator: model observable name (H, I, sz_total, total_sz, sz_<i>, sx_<i>, current_<i>, "
    "current) or {\"dim\", \"re\", \"im\"}";

const std::vector<Field>& root_fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(str("task", nullptr, "task to run; must match the subcommand",
                    scenario_tasks()));
    f.push_back(integer("seed", 0, "seed for random instances", 0.0));
    f.push_back(block(
        "model", "spin chain",
        {str("kind", "xx_chain", "model family", {"xx_chain", "xxz_chain", "custom"}),
         integer("sites", 2, "number of spins", 1.0),
         num("jxy", 1.0, "XY coupling"),
         num("jz", 0.0, "Z coupling (xxz_chain)"),
         num("field", 0.0, "longitudinal field"),
         integer("max_sites", kDefaultMaxSites, "dimension cap in sites", 1.0),
         op("H", nullptr, "Hamiltonian of a custom model, {\"dim\", \"re\", \"im\"}")}));
    f.push_back(block("output", "output options",
                      {str("format", "json", "output format", {"json", "csv"})}));
    f.push_back(block(
        "derive", "first quantum derivative of f at A in direction B",
        {str("function", "log", "exp_neg, inverse, log or exp_scaled:<c>"),
         op("A", "H", kOpDoc), num("shift", 2.0, "A is replaced by A + shift * I"),
         op("B", "sx_0", kOpDoc), integer("series_terms", 30, "series truncation", 0.0),
         num("fd_step", 1e-6, "central-difference step", 0.0, true)}));
    f.push_back(block(
        "taylor", "operator Taylor expansion of f(A + x B)",
        {str("function", "log", "exp_neg, inverse, log or exp_scaled:<c>"),
         op("A", "H", kOpDoc), num("shift", 2.0, "A is replaced by A + shift * I"),
         op("B", "sx_0", kOpDoc), integer("order", 6, "highest derivative order", 0.0),
         Field{"x", FieldType::number_list, json::array({0.2, 0.1, 0.05}), "expansion points"}}));
    f.push_back(block(
        "response", "conductivity sigma(omega)",
        {op("J", "current", kOpDoc), num("beta", 1.0, "inverse temperature", 0.0, true),
         num("epsilon", 0.05, "adiabatic rate", 0.0, true),
         num("omega_min", -3.0, "first frequency"), num("omega_max", 3.0, "last frequency"),
         integer("points", 50, "number of frequencies", 1.0),
         Field{"omega", FieldType::number_list, nullptr, "explicit frequencies (overrides the grid)"},
         str("method", "resolvent", "evaluation method",
             {"resolvent", "time_integral", "series", "large_omega"}),
         integer("series_order", 12, "series truncation", 0.0)}));
    f.push_back(block(
        "zubarev", "entropy-operator series under H - A F(t)",
        {op("A_op", "sz_0", kOpDoc), num("beta", 1.0, "inverse temperature", 0.0, true),
         block("force", "force protocol",
               {num("amplitude", 0.01, "force amplitude"),
                str("waveform", "cos", "force shape", {"cos", "step"}),
                num("omega", 1.0, "angular frequency"),
                num("epsilon", 0.05, "adiabatic rate", 0.0, true),
                num("t_start", -400.0, "switch-on time")}),
         block("grid", "observation times",
               {num("t_begin", 0.0, "first time"), num("t_end", 2.0, "last time"),
                num("dt", 0.5, "spacing", 0.0, true)}),
         integer("order", 2, "highest series order", 1.0),
         Field{"observables", FieldType::string_list, json::array({"sz_0"}),
               "averages reported under the truncated density"},
         Field{"ode", FieldType::boolean, false, "also integrate the nonperturbative eta'"}}));
    f.push_back(block(
        "dissipative", "unnormalized master equation with a non-Hermitian part",
        {op("Lambda", "sz_0", kOpDoc), num("lambda_scale", -0.1, "Lambda is scaled by this"),
         op("rho0", "thermal",
            "initial density: thermal, maximally_mixed, random (from the seed) or an operator"),
         num("beta", 1.0, "inverse temperature of the thermal start", 0.0, true),
         num("t_end", 1.0, "final time", 0.0, true),
         num("dt", 0.1, "output spacing", 0.0, true)}));
    f.push_back(block("verify-all", "acceptance checks",
                      {Field{"criteria", FieldType::integer_list, json::array(),
                             "criterion ids 1..12 (empty: all)"}}));
    return f;
  }();
  return fields;
}

json type_schema(const Field& f) {
  json s;
  switch (f.type) {
    case FieldType::number: s = {{"type", "number"}}; break;
    case FieldType::integer: s = {{"type", "integer"}}; break;
    case FieldType::string: s = {{"type", "string"}}; break;
    case FieldType::boolean: s = {{"type", "boolean"}}; break;
    case FieldType::op_ref:
      s = {{"oneOf",
            {{{"type", "string"}},
             {{"type", "object"},
              {"required", {"dim", "re", "im"}},
              {"properties",
               {{"dim", {{"type", "integer"}}},
                {"re", {{"type", "array"}}},
                {"im", {{"type", "array"}}}}}}}}};
      break;
    case FieldType::number_list: s = {{"type", "array"}, {"items", {{"type", "number"}}}}; break;
    case FieldType::integer_list: s = {{"type", "array"}, {"items", {{"type", "integer"}}}}; break;
    case FieldType::string_list: s = {{"type", "array"}, {"items", {{"type", "string"}}}}; break;
    case FieldType::block: {
      json props = json::object();
      for (const Field& c : f.children) props[c.name] = type_schema(c);
      s = {{"type", "object"}, {"additionalProperties", false}, {"properties", props}};
      break;
    }
  }
  if (!f.choices.empty()) s["enum"] = f.choices;
  if (f.minimum) s[f.exclusive ? "exclusiveMinimum" : "minimum"] = *f.minimum;
  if (!f.doc.empty()) s["description"] = f.doc;
  if (!f.def.is_null() && f.type != FieldType::block) s["default"] = f.def;
  return s;
}

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_value(const Field& f, const json& v, const std::string& path) {
  auto all_of = [&](auto pred) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!pred(e)) return false;
    }
    return true;
  };
  bool ok = true;
  switch (f.type) {
    case FieldType::number: ok = v.is_number(); break;
    case FieldType::integer: ok = v.is_number_integer(); break;
    case FieldType::string: ok = v.is_string(); break;
    case FieldType::boolean: ok = v.is_boolean(); break;
    case FieldType::op_ref: ok = v.is_string() || v.is_object(); break;
    case FieldType::number_list: ok = all_of([](const json& e) { return e.is_number(); }); break;
    case FieldType::integer_list:
      ok = all_of([](const json& e) { return e.is_number_integer(); });
      break;
    case FieldType::string_list: ok = all_of([](const json& e) { return e.is_string(); }); break;
    case FieldType::block: ok = v.is_object(); break;
  }
  if (!ok) config_error(path, "wrong type");
  if (!f.choices.empty()) {
    const std::string s = v.get<std::string>();
    if (std::find(f.choices.begin(), f.choices.end(), s) == f.choices.end()) {
      config_error(path, "'" + s + "' is not one of the allowed values");
    }
  }
  if (f.minimum) {
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < *f.minimum || (f.exclusive && x == *f.minimum)) {
      std::ostringstream msg;
      msg << "must be " << (f.exclusive ? "> " : ">= ") << *f.minimum;
      config_error(path, msg.str());
    }
  }
}

json resolve_block(const std::vector<Field>& fields, const json& in, const std::string& path) {
  if (!in.is_object()) config_error(path.empty() ? "document" : path, "expected an object");
  for (const auto& [key, value] : in.items()) {
    const bool known = std::any_of(fields.begin(), fields.end(),
                                   [&](const Field& f) { return f.name == key; });
    if (!known) config_error(path.empty() ? key : path + "." + key, "unknown key");
  }
  json out = json::object();
  for (const Field& f : fields) {
    const std::string p = path.empty() ? f.name : path + "." + f.name;
    if (f.type == FieldType::block) {
      out[f.name] = resolve_block(f.children, in.contains(f.name) ? in.at(f.name) : json::object(), p);
      continue;
    }
    if (in.contains(f.name)) {
      check_value(f, in.at(f.name), p);
      out[f.name] = in.at(f.name);
    } else if (!f.def.is_null()) {
      out[f.name] = f.def;
    }
  }
  return out;
}

// ---- operators from the configuration ---------------------------------------

Operator resolve_operator(const json& ref, const Model& model, const std::string& path) {
  const int dim = static_cast<int>(model.h.rows());
  if (ref.is_string()) {
    const std::string name = ref.get<std::string>();
    if (name == "H") return model.h;
    if (name == "I") return identity(dim);
    try {
      return model.observable(name);
    } catch (const ConfigError& e) {
      config_error(path, e.what());
    }
  }
  Operator o;
  try {
    o = operator_from_json(ref);
  } catch (const std::exception& e) {
    config_error(path, e.what());
  }
  if (o.rows() != dim) config_error(path, "dimension does not match the model");
  return o;
}

ScalarFunction resolve_function(const json& name, const std::string& path) {
  try {
    return ScalarFunction::from_name(name.get<std::string>());
  } catch (const std::exception& e) {
    config_error(path, e.what());
  }
}

// ---- tables and output --------------------------------------------------------

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(r);
  return {{"columns", t.columns}, {"rows", rows}};
}

std::string csv_cell(const json& v) {
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

void write_atomically(const fs::path& target, const std::string& body) {
  fs::create_directories(target.parent_path().empty() ? fs::path(".") : target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw TaskError("cannot open " + tmp.string() + " for writing");
    out << body;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw TaskError("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

// ---- tasks ---------------------------------------------------------------------

struct TaskOutput {
  Table table;
  json extra = json::object();
  int status = 0;
  std::string summary;
};

TaskOutput run_derive(const ScenarioConfig& cfg, const Model& m) {
  const json& p = cfg.params();
  const ScalarFunction f = resolve_function(p["function"], "derive.function");
  const int d = static_cast<int>(m.h.rows());
  const Operator a = resolve_operator(p["A"], m, "derive.A") + p["shift"].get<double>() * identity(d);
  const Operator b = resolve_operator(p["B"], m, "derive.B");
  const int n_max = p["series_terms"].get<int>();
  const double h = p["fd_step"].get<double>();

  const Operator kernel = quantum_derivative_apply(f, a, b);
  const double fd_error = (kernel - gateaux_fd(f, a, b, h)).norm();
  const RootSequence alpha = n_max > 0 ? alpha_estimate(a, b, n_max) : RootSequence{};
  const RootSequence weighted = n_max > 0 ? series_alpha(f, a, b, n_max) : RootSequence{};

  TaskOutput out;
  out.table.columns = {"n", "series_error", "alpha_n", "series_alpha_n"};
  for (int n = 0; n <= n_max; ++n) {
    const double err = (series_derivative(f, a, b, n) - kernel).norm();
    const json an = n >= 1 ? json(alpha.terms[n - 1]) : json(nullptr);
    const json sn = n >= 1 ? json(weighted.terms[n - 1]) : json(nullptr);
    out.table.rows.push_back({n, err, an, sn});
  }
  out.extra = {{"derivative", operator_to_json(kernel)},
               {"finite_difference_error", fd_error},
               {"alpha_verdict", n_max > 0 ? json(alpha.verdict()) : json(nullptr)},
               {"series_alpha_verdict", n_max > 0 ? json(weighted.verdict()) : json(nullptr)}};
  char buf[128];
  std::snprintf(buf, sizeof buf, "||df/dA : B|| = %.6g, finite-difference gap %.3e",
                kernel.norm(), fd_error);
  out.summary = buf;
  return out;
}

TaskOutput run_taylor(const ScenarioConfig& cfg, const Model& m) {
  const json& p = cfg.params();
  const ScalarFunction f = resolve_function(p["function"], "taylor.function");
  const int d = static_cast<int>(m.h.rows());
  const Operator a = resolve_operator(p["A"], m, "taylor.A") + p["shift"].get<double>() * identity(d);
  const Operator b = resolve_operator(p["B"], m, "taylor.B");
  const int order = p["order"].get<int>();

  TaskOutput out;
  out.table.columns = {"x", "remainder", "norm_sum"};
  for (const auto& xv : p["x"]) {
    const double x = xv.get<double>();
    const Operator sum = taylor_sum(f, a, b, x, order);
    const double rem = (sum - function_of(f, a + x * b)).norm();
    out.table.rows.push_back({x, rem, sum.norm()});
  }
  out.summary = std::to_string(out.table.rows.size()) + " expansion points at order " +
                std::to_string(order);
  return out;
}

TaskOutput run_response(const ScenarioConfig& cfg, const Model& m) {
  const json& p = cfg.params();
  const Operator j = resolve_operator(p["J"], m, "response.J");
  const ResponseSetup setup(m.h, j, p["beta"].get<double>(), p["epsilon"].get<double>());
  std::vector<double> omegas;
  if (p.contains("omega")) {
    omegas = p["omega"].get<std::vector<double>>();
  } else {
    const int n = p["points"].get<int>();
    const double lo = p["omega_min"].get<double>();
    const double hi = p["omega_max"].get<double>();
    for (int k = 0; k < n; ++k) omegas.push_back(n == 1 ? lo : lo + (hi - lo) * k / (n - 1));
  }
  const std::string method = p["method"].get<std::string>();
  const int order = p["series_order"].get<int>();
  auto evaluate = [&](double w) -> ConductivityResult {
    if (method == "time_integral") return conductivity_time_integral(setup, w);
    if (method == "series") return conductivity_series(setup, w, order);
    if (method == "large_omega") return large_omega(setup, w);
    return conductivity(setup, w);
  };

  // Each worker fills its own slots, so the result does not depend on the thread count.
  std::vector<ConductivityResult> results(omegas.size());
  std::vector<std::exception_ptr> errors(omegas.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(omegas.size())));
  auto work = [&](unsigned w) {
    for (std::size_t k = w; k < omegas.size(); k += workers) {
      try {
        results[k] = evaluate(omegas[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  TaskOutput out;
  out.table.columns = {"omega", "re_sigma", "im_sigma", "method", "epsilon"};
  json estimates = json::array();
  for (std::size_t k = 0; k < omegas.size(); ++k) {
    const ConductivityResult& r = results[k];
    out.table.rows.push_back({omegas[k], r.sigma.real(), r.sigma.imag(), method_name(r.method), r.epsilon});
    estimates.push_back(r.error_estimate);
  }
  out.extra = {{"error_estimates", estimates},
               {"thermal_mean_of_J", setup.j_mean()},
               {"spectrum", std::vector<double>(setup.spectrum().eigenvalues.data(),
                                                setup.spectrum().eigenvalues.data() +
                                                    setup.spectrum().eigenvalues.size())}};
  out.summary = std::to_string(omegas.size()) + " frequencies by " + method;
  return out;
}

TaskOutput run_zubarev(const ScenarioConfig& cfg, const Model& m) {
  const json& p = cfg.params();
  ZubarevSetup s;
  s.h = m.h;
  s.a = resolve_operator(p["A_op"], m, "zubarev.A_op");
  s.beta = p["beta"].get<double>();
  const json& force = p["force"];
  s.protocol.amplitude = force["amplitude"].get<double>();
  s.protocol.waveform = force["waveform"].get<std::string>() == "step"
                            ? ForceProtocol::Waveform::step
                            : ForceProtocol::Waveform::cosine;
  s.protocol.omega = force["omega"].get<double>();
  s.protocol.epsilon = force["epsilon"].get<double>();
  s.protocol.t_start = force["t_start"].get<double>();
  s.validate();
  const int order = p["order"].get<int>();
  const bool ode = p["ode"].get<bool>();
  std::vector<std::pair<std::string, Operator>> observables;
  for (const auto& name : p["observables"]) {
    observables.emplace_back(name.get<std::string>(),
                             resolve_operator(name, m, "zubarev.observables"));
  }
  const json& g = p["grid"];
  const double t0 = g["t_begin"].get<double>();
  const double t1 = g["t_end"].get<double>();
  if (t1 < t0) config_error("zubarev.grid", "t_end precedes t_begin");
  if (t0 <= s.protocol.t_start) config_error("zubarev.grid", "t_begin must follow t_start");
  const std::vector<double> times = t1 > t0 ? uniform_grid(t0, t1, g["dt"].get<double>())
                                            : std::vector<double>{t0};

  TaskOutput out;
  out.table.columns = {"t"};
  for (int k = 1; k <= order; ++k) out.table.columns.push_back("norm_eta" + std::to_string(k));
  for (const auto& [name, _] : observables) out.table.columns.push_back("avg_" + name);
  if (ode) out.table.columns.push_back("ode_residual");

  EntropyExpansion last;
  for (double t : times) {
    const EntropyExpansion ex = entropy_expansion(s, t, order);
    const Operator rho = zubarev_density(ex, s.h);
    std::vector<json> row{t};
    for (const Operator& term : ex.terms) row.push_back(term.norm());
    for (const auto& [_, o] : observables) row.push_back((rho * o).trace().real());
    if (ode) {
      Operator sum = zeros(static_cast<int>(s.h.rows()));
      for (const Operator& term : ex.terms) sum += term;
      const Operator eta_prime = eta_prime_ode(s, {s.protocol.t_start, t}).states.back();
      row.push_back((eta_prime - sum).norm());
    }
    out.table.rows.push_back(std::move(row));
    last = ex;
  }
  json terms = json::array();
  for (const Operator& term : last.terms) terms.push_back(operator_to_json(term));
  out.extra = {{"phi", last.phi}, {"final_time", times.back()}, {"final_terms", terms}};
  out.summary = std::to_string(times.size()) + " times, series through order " +
                std::to_string(order);
  return out;
}

TaskOutput run_dissipative(const ScenarioConfig& cfg, const Model& m) {
  const json& p = cfg.params();
  const int d = static_cast<int>(m.h.rows());
  DissipativeModel model;
  model.h = m.h;
  model.lambda = p["lambda_scale"].get<double>() * resolve_operator(p["Lambda"], m, "dissipative.Lambda");
  model.validate();

  Operator rho0;
  const json& r0 = p["rho0"];
  if (r0.is_string() && r0.get<std::string>() == "thermal") {
    rho0 = function_of(ScalarFunction::exp_scaled(-p["beta"].get<double>()), m.h);
    rho0 /= rho0.trace();
  } else if (r0.is_string() && r0.get<std::string>() == "maximally_mixed") {
    rho0 = identity(d) / static_cast<double>(d);
  } else if (r0.is_string() && r0.get<std::string>() == "random") {
    verify::Rng rng(cfg.seed);
    rho0 = verify::random_density(d, rng);
  } else {
    rho0 = resolve_operator(r0, m, "dissipative.rho0");
  }

  const std::vector<double> grid = uniform_grid(0.0, p["t_end"].get<double>(), p["dt"].get<double>());
  const Trajectory traj = master_evolve(model, rho0, grid);

  TaskOutput out;
  out.table.columns = {"t", "trace", "norm", "entropy_residual"};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Operator& rho = traj.states[k];
    double residual = 0.0;
    if (grid[k] > 0.0) {
      const EntropyOperatorResult e = entropy_operator(model, rho0, grid[k]);
      residual = (expm_general(e.phi) - rho).norm();
    } else {
      residual = (function_of(ScalarFunction::exp_scaled(1.0), function_of(ScalarFunction::log(), rho0)) - rho).norm();
    }
    out.table.rows.push_back({grid[k], rho.trace().real(), rho.norm(), residual});
  }
  out.extra = {{"final_rho", operator_to_json(traj.states.back())},
               {"master_error_estimate", traj.error_estimate}};
  out.summary = std::to_string(grid.size()) + " times to t = " + std::to_string(grid.back());
  return out;
}

TaskOutput run_verify_all(const ScenarioConfig& cfg, const Model&) {
  const json& p = cfg.params();
  std::vector<int> ids = p["criteria"].get<std::vector<int>>();
  for (int id : ids) {
    if (id < 1 || id > verify::kLibraryCriteria) {
      config_error("verify-all.criteria", "no criterion " + std::to_string(id));
    }
  }
  const auto results = verify::run_acceptance(cfg.seed, ids);
  TaskOutput out;
  out.table.columns = {"id", "name", "pass", "detail"};
  json list = json::array();
  int passed = 0;
  for (const auto& r : results) {
    out.table.rows.push_back({r.id, r.name, r.pass ? "PASS" : "FAIL", r.detail});
    list.push_back(verify::to_json(r));
    if (r.pass) ++passed;
  }
  const int total = static_cast<int>(results.size());
  out.extra = {{"criteria", list}, {"passed", passed}, {"total", total},
               {"all_pass", passed == total}};
  out.status = passed == total ? 0 : 1;
  out.summary = std::to_string(passed) + "/" + std::to_string(total) + " criteria passed";
  return out;
}

json echo(const ScenarioConfig& cfg) {
  json e = cfg.resolved;
  e["seed"] = cfg.seed;
  e["output"]["format"] = cfg.format;
  return e;
}

}  // namespace

const std::vector<std::string>& scenario_tasks() {
  static const std::vector<std::string> tasks{"derive",  "taylor",      "response",
                                              "zubarev", "dissipative", "verify-all"};
  return tasks;
}

std::string library_version() { return QA_VERSION; }

json scenario_schema() {
  json props = json::object();
  for (const Field& f : root_fields()) props[f.name] = type_schema(f);
  return {{"$schema", "http://json-schema.org/draft-07/schema#"},
          {"title", "hyperop scenario"},
          {"type", "object"},
          {"additionalProperties", false},
          {"properties", props}};
}

ScenarioConfig parse_scenario(const json& doc, const ScenarioOverrides& o) {
  const auto& tasks = scenario_tasks();
  if (std::find(tasks.begin(), tasks.end(), o.task) == tasks.end()) {
    throw ConfigError("unknown task '" + o.task + "'");
  }
  json resolved = resolve_block(root_fields(), doc, "");
  if (resolved.contains("task") && resolved["task"].get<std::string>() != o.task) {
    throw ConfigError("task: document says '" + resolved["task"].get<std::string>() +
                      "' but the subcommand is '" + o.task + "'");
  }
  resolved["task"] = o.task;
  // Only the block of the selected task is kept in the echo.
  for (const auto& t : tasks) {
    if (t != o.task) resolved.erase(t);
  }

  ScenarioConfig cfg;
  cfg.task = o.task;
  cfg.seed = o.seed ? *o.seed : resolved["seed"].get<std::uint64_t>();
  cfg.format = o.format ? *o.format : resolved["output"]["format"].get<std::string>();
  if (cfg.format != "json" && cfg.format != "csv") {
    throw ConfigError("format: '" + cfg.format + "' is not json or csv");
  }
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.threads) cfg.threads = std::max(1u, *o.threads);

  const json& mj = resolved["model"];
  ModelSpec spec;
  spec.kind = model_kind_from_name(mj["kind"].get<std::string>());
  spec.sites = mj["sites"].get<int>();
  spec.jxy = mj["jxy"].get<double>();
  spec.jz = mj["jz"].get<double>();
  spec.field = mj["field"].get<double>();
  spec.max_sites = mj["max_sites"].get<int>();
  if (mj.contains("H")) {
    try {
      spec.custom_h = operator_from_json(mj["H"]);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("model.H: ") + e.what());
    }
    spec.sites = 0;
    for (auto d = spec.custom_h->rows(); d > 1; d /= 2) ++spec.sites;
    if ((1 << spec.sites) != spec.custom_h->rows()) {
      throw ConfigError("model.H: dimension must be a power of two");
    }
    resolved["model"]["sites"] = spec.sites;
  } else if (spec.kind == ModelSpec::Kind::custom) {
    throw ConfigError("model.H: a custom model needs a Hamiltonian");
  }
  cfg.model = spec;
  cfg.resolved = std::move(resolved);
  return cfg;
}

ScenarioConfig load_scenario(const fs::path& path, const ScenarioOverrides& o) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
  return parse_scenario(doc, o);
}

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
  Model model;
  try {
    model = build_model(cfg.model);
  } catch (const ConfigError&) {
    throw;
  } catch (const DimensionCap& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }

  TaskOutput out;
  try {
    if (cfg.task == "derive") out = run_derive(cfg, model);
    else if (cfg.task == "taylor") out = run_taylor(cfg, model);
    else if (cfg.task == "response") out = run_response(cfg, model);
    else if (cfg.task == "zubarev") out = run_zubarev(cfg, model);
    else if (cfg.task == "dissipative") out = run_dissipative(cfg, model);
    else if (cfg.task == "verify-all") out = run_verify_all(cfg, model);
    else throw ConfigError("unknown task '" + cfg.task + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw TaskError(cfg.task + ": " + e.what());
  }

  const json header = {{"version", library_version()}, {"task", cfg.task}, {"config", echo(cfg)}};
  std::string body;
  if (cfg.format == "json") {
    json doc = header;
    doc["results"] = out.extra;
    doc["results"]["table"] = table_json(out.table);
    doc["status"] = out.status;
    body = doc.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "# version: " << library_version() << "\n# config: " << echo(cfg).dump() << "\n";
    for (std::size_t c = 0; c < out.table.columns.size(); ++c) {
      csv << (c ? "," : "") << out.table.columns[c];
    }
    csv << "\n";
    for (const auto& row : out.table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << csv_cell(row[c]);
      csv << "\n";
    }
    body = csv.str();
  }
  const fs::path target = cfg.out_dir / (cfg.task + "." + cfg.format);
  write_atomically(target, body);

  ScenarioOutcome outcome;
  outcome.status = out.status;
  outcome.files.push_back(target);
  outcome.summary = out.summary;
  return outcome;
}

}  // namespace qa
