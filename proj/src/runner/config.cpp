#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mlab/errors.hpp"
#include "mlab/runner.hpp"
#include "runner_internal.hpp"

namespace mlab {
namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node && !node.Mark().is_null()) os << ":" << node.Mark().line + 1;
    os << ": " << path << ": " << msg;
    throw ConfigError(os.str());
  }

  void require_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
  }

  void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) const {
    require_map(node, path);
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, join(path, key), "unknown key '" + key + "'");
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& path, const char* what) const {
    if (!node.IsScalar()) fail(node, path, std::string("expected ") + what);
    try {
      return node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, path, std::string("expected ") + what + ", got '" + node.Scalar() + "'");
    }
  }

  double number(const YAML::Node& n, const std::string& p) const {
    const double v = scalar<double>(n, p, "a number");
    if (!std::isfinite(v)) fail(n, p, "must be finite");
    return v;
  }
  double positive(const YAML::Node& n, const std::string& p) const {
    const double v = number(n, p);
    if (!(v > 0.0)) fail(n, p, "must be positive");
    return v;
  }
  long integer(const YAML::Node& n, const std::string& p) const { return scalar<long>(n, p, "an integer"); }
  std::size_t count(const YAML::Node& n, const std::string& p) const {
    const long v = integer(n, p);
    if (v < 0) fail(n, p, "must be non-negative");
    return static_cast<std::size_t>(v);
  }
  bool boolean(const YAML::Node& n, const std::string& p) const { return scalar<bool>(n, p, "true or false"); }
  std::string text(const YAML::Node& n, const std::string& p) const { return scalar<std::string>(n, p, "a string"); }

  std::vector<double> numbers(const YAML::Node& n, const std::string& p) const {
    if (!n.IsSequence()) fail(n, p, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], p + "[" + std::to_string(i) + "]"));
    return out;
  }

  static std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

 private:
  std::string source_;
};

GridSpec read_grid(const Reader& r, const YAML::Node& n, const std::string& p) {
  r.check_keys(n, p, {"dim", "points", "length"});
  GridSpec g;
  if (n["dim"]) g.dim = static_cast<int>(r.integer(n["dim"], p + ".dim"));
  if (n["points"]) g.points = r.count(n["points"], p + ".points");
  if (n["length"]) g.length = r.positive(n["length"], p + ".length");
  if (g.dim < 1 || g.dim > 3) r.fail(n, p + ".dim", "must be 1, 2 or 3");
  if (g.points < 8 || (g.points & (g.points - 1)) != 0) r.fail(n, p + ".points", "must be a power of two >= 8");
  return g;
}

InitialData read_initial(const Reader& r, const YAML::Node& n, const std::string& p, InitialData d = {}) {
  r.check_keys(n, p,
               {"kind", "amplitude", "width", "chirp", "center", "velocity", "eta", "seed", "decay_rate", "mass",
                "envelope_width", "max_wavenumber"});
  if (n["kind"]) {
    try {
      d.kind = initial_kind_from_string(r.text(n["kind"], p + ".kind"));
    } catch (const ContractError& e) {
      r.fail(n["kind"], p + ".kind", e.what());
    }
  }
  if (n["amplitude"]) d.amplitude = r.number(n["amplitude"], p + ".amplitude");
  if (n["width"]) d.width = r.positive(n["width"], p + ".width");
  if (n["chirp"]) d.chirp = r.number(n["chirp"], p + ".chirp");
  if (n["center"]) d.center = r.numbers(n["center"], p + ".center");
  if (n["velocity"]) d.velocity = r.numbers(n["velocity"], p + ".velocity");
  if (n["eta"]) d.eta = r.positive(n["eta"], p + ".eta");
  if (n["seed"]) d.seed = r.count(n["seed"], p + ".seed");
  if (n["decay_rate"]) d.decay_rate = r.positive(n["decay_rate"], p + ".decay_rate");
  if (n["mass"]) d.mass = r.positive(n["mass"], p + ".mass");
  if (n["envelope_width"]) d.envelope_width = r.number(n["envelope_width"], p + ".envelope_width");
  if (n["max_wavenumber"]) d.max_wavenumber = r.number(n["max_wavenumber"], p + ".max_wavenumber");
  return d;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void apply(const Reader& r, const YAML::Node& n, const std::string& p, Scenario& s) {
  r.check_keys(n, p,
               {"name", "suite", "description", "base", "grid", "grids", "equation", "initial", "mixture", "solver",
                "weight", "observers", "tolerances", "samples", "seed", "gp", "output"});
  if (n["name"]) s.name = r.text(n["name"], p + ".name");
  if (n["suite"]) s.suite = r.text(n["suite"], p + ".suite");
  if (n["description"]) s.description = r.text(n["description"], p + ".description");
  if (n["grid"] && n["grids"]) r.fail(n["grids"], p + ".grids", "give either grid or grids, not both");
  if (n["grid"]) s.grids = {read_grid(r, n["grid"], p + ".grid")};
  if (n["grids"]) {
    if (!n["grids"].IsSequence() || n["grids"].size() == 0) r.fail(n["grids"], p + ".grids", "expected a non-empty list");
    s.grids.clear();
    for (std::size_t i = 0; i < n["grids"].size(); ++i)
      s.grids.push_back(read_grid(r, n["grids"][i], p + ".grids[" + std::to_string(i) + "]"));
  }
  if (const auto e = n["equation"]) {
    r.check_keys(e, p + ".equation", {"lambda", "exponent"});
    if (e["lambda"]) s.equation.lambda = r.number(e["lambda"], p + ".equation.lambda");
    if (e["exponent"]) {
      s.equation.exponent = r.number(e["exponent"], p + ".equation.exponent");
      if (!(s.equation.exponent > 1.0)) r.fail(e["exponent"], p + ".equation.exponent", "must exceed 1");
    }
  }
  if (n["initial"]) s.initial = read_initial(r, n["initial"], p + ".initial", s.initial.value_or(InitialData{}));
  if (const auto m = n["mixture"]) {
    r.check_keys(m, p + ".mixture", {"weights", "orbitals"});
    MixtureSpec mix = s.mixture.value_or(MixtureSpec{});
    if (m["weights"]) mix.weights = r.numbers(m["weights"], p + ".mixture.weights");
    if (m["orbitals"]) {
      if (!m["orbitals"].IsSequence()) r.fail(m["orbitals"], p + ".mixture.orbitals", "expected a list");
      mix.orbitals.clear();
      for (std::size_t i = 0; i < m["orbitals"].size(); ++i)
        mix.orbitals.push_back(read_initial(r, m["orbitals"][i], p + ".mixture.orbitals[" + std::to_string(i) + "]"));
    }
    if (mix.weights.size() != mix.orbitals.size())
      r.fail(m, p + ".mixture", "weights and orbitals differ in length");
    for (double w : mix.weights)
      if (!(w > 0.0)) r.fail(m["weights"], p + ".mixture.weights", "weights must be positive");
    s.mixture = mix;
  }
  if (const auto v = n["solver"]) {
    const std::string q = p + ".solver";
    r.check_keys(v, q,
                 {"dt", "steps", "horizon", "method", "dealias", "observer_stride", "dt_list", "check_decay",
                  "decay_tolerance", "blowup_factor"});
    if (v["dt"]) s.solver.dt = r.positive(v["dt"], q + ".dt");
    if (v["steps"]) s.solver.steps = static_cast<long>(r.count(v["steps"], q + ".steps"));
    if (v["horizon"])
      s.horizon = r.positive(v["horizon"], q + ".horizon");
    else if (v["dt"] || v["steps"])
      s.horizon.reset();  // an inherited horizon no longer describes the run
    if (v["method"]) {
      try {
        s.solver.method = method_from_string(r.text(v["method"], q + ".method"));
      } catch (const ContractError& e) {
        r.fail(v["method"], q + ".method", e.what());
      }
    }
    if (v["dealias"]) s.solver.dealias = r.boolean(v["dealias"], q + ".dealias");
    if (v["observer_stride"]) s.solver.observer_stride = static_cast<long>(r.count(v["observer_stride"], q + ".observer_stride"));
    if (v["dt_list"]) {
      s.dt_list = r.numbers(v["dt_list"], q + ".dt_list");
      for (double dt : s.dt_list)
        if (!(dt > 0.0)) r.fail(v["dt_list"], q + ".dt_list", "entries must be positive");
    }
    if (v["check_decay"]) s.solver.check_decay = r.boolean(v["check_decay"], q + ".check_decay");
    if (v["decay_tolerance"]) s.solver.decay_tolerance = r.positive(v["decay_tolerance"], q + ".decay_tolerance");
    if (v["blowup_factor"]) s.solver.blowup_factor = r.positive(v["blowup_factor"], q + ".blowup_factor");
    if (s.solver.observer_stride < 1) r.fail(v, q + ".observer_stride", "must be at least 1");
    if (s.solver.steps > 0 && s.solver.steps % s.solver.observer_stride != 0)
      r.fail(v, q + ".observer_stride", "must divide steps");
  }
  if (s.horizon) {
    const double h = s.solver.dt * static_cast<double>(s.solver.steps);
    if (std::abs(h - *s.horizon) > 1e-9 * *s.horizon) {
      std::ostringstream os;
      os << "dt * steps = " << h << " does not match the declared horizon " << *s.horizon;
      r.fail(n["solver"] ? n["solver"]["horizon"] : n, p + ".solver.horizon", os.str());
    }
  }
  if (const auto w = n["weight"]) {
    const std::string q = p + ".weight";
    r.check_keys(w, q, {"kind", "epsilon", "epsilon_list", "center"});
    if (w["kind"] && r.text(w["kind"], q + ".kind") != "abs_smoothed")
      r.fail(w["kind"], q + ".kind", "only abs_smoothed is available");
    if (w["epsilon"]) {
      s.weight.epsilon = r.number(w["epsilon"], q + ".epsilon");
      if (s.weight.epsilon < 0.0) r.fail(w["epsilon"], q + ".epsilon", "must be non-negative");
    }
    if (w["epsilon_list"]) {
      s.weight.epsilon_list = r.numbers(w["epsilon_list"], q + ".epsilon_list");
      for (double e : s.weight.epsilon_list)
        if (!(e > 0.0)) r.fail(w["epsilon_list"], q + ".epsilon_list", "entries must be positive");
    }
    if (w["center"]) s.weight.center = r.numbers(w["center"], q + ".center");
  }
  if (const auto o = n["observers"]) {
    if (!o.IsSequence()) r.fail(o, p + ".observers", "expected a list of names");
    s.observers.clear();
    for (std::size_t i = 0; i < o.size(); ++i) s.observers.push_back(r.text(o[i], p + ".observers[" + std::to_string(i) + "]"));
  }
  if (const auto t = n["tolerances"]) {
    r.require_map(t, p + ".tolerances");
    for (const auto& kv : t) {
      const std::string key = kv.first.as<std::string>();
      const double v = r.number(kv.second, p + ".tolerances." + key);
      if (v < 0.0) r.fail(kv.second, p + ".tolerances." + key, "must be non-negative");
      s.tolerances[key] = v;
    }
  }
  if (n["samples"]) s.samples = r.count(n["samples"], p + ".samples");
  if (n["seed"]) s.seed = r.count(n["seed"], p + ".seed");
  if (const auto g = n["gp"]) {
    const std::string q = p + ".gp";
    r.check_keys(g, q, {"k_values", "alpha_values", "xi", "k_max", "tensor_points"});
    if (g["k_values"]) {
      s.gp.k_values.clear();
      for (double k : r.numbers(g["k_values"], q + ".k_values")) {
        if (k != std::floor(k) || k < 1 || k > 3) r.fail(g["k_values"], q + ".k_values", "entries must be 1, 2 or 3");
        s.gp.k_values.push_back(static_cast<int>(k));
      }
    }
    if (g["alpha_values"]) s.gp.alpha_values = r.numbers(g["alpha_values"], q + ".alpha_values");
    if (g["xi"]) s.gp.xi = r.positive(g["xi"], q + ".xi");
    if (g["k_max"]) s.gp.k_max = static_cast<int>(r.count(g["k_max"], q + ".k_max"));
    if (g["tensor_points"]) s.gp.tensor_points = r.count(g["tensor_points"], q + ".tensor_points");
  }
  if (const auto o = n["output"]) {
    r.check_keys(o, p + ".output", {"dir"});
    if (o["dir"]) s.output_dir = r.text(o["dir"], p + ".output.dir");
  }
}

void validate(const Reader& r, const YAML::Node& n, const std::string& p, const Scenario& s) {
  if (s.name.empty()) r.fail(n, p + ".name", "missing");
  const auto& suites = suite_criteria();
  const auto it = suites.find(s.suite);
  if (it == suites.end()) r.fail(n["suite"] ? n["suite"] : n, p + ".suite", "unknown suite '" + s.suite + "'");
  for (const auto& [key, v] : s.tolerances)
    if (!it->second.count(key))
      r.fail(n["tolerances"] ? n["tolerances"][key] : n, p + ".tolerances." + key,
             "suite '" + s.suite + "' has no criterion '" + key + "'");
  const auto& allowed = suite_observers(s.suite);
  for (std::size_t i = 0; i < s.observers.size(); ++i)
    if (!allowed.count(s.observers[i]))
      r.fail(n["observers"] ? n["observers"][i] : n, p + ".observers[" + std::to_string(i) + "]",
             "unknown observer '" + s.observers[i] + "' for suite '" + s.suite + "'");
  if (s.grids.empty()) r.fail(n, p, "no grid given");
  if (!(s.solver.dt > 0.0)) r.fail(n, p + ".solver.dt", "must be positive");
}

}  // namespace

std::vector<Scenario> parse_scenarios(const std::string& text, const std::string& source, bool allow_base) {
  const Reader r(source);
  YAML::Node loaded;
  try {
    loaded = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": syntax error: " + e.msg);
  }
  const YAML::Node& root = loaded;
  std::vector<Scenario> out;
  if (!root || root.IsNull()) return out;
  std::vector<std::pair<YAML::Node, std::string>> items;
  if (root.IsMap() && root["scenarios"]) {
    r.check_keys(root, "", {"scenarios"});
    const YAML::Node list = root["scenarios"];
    if (list.IsNull()) return out;
    if (!list.IsSequence()) r.fail(list, "scenarios", "expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) items.emplace_back(list[i], "scenarios[" + std::to_string(i) + "]");
  } else if (root.IsMap()) {
    items.emplace_back(root, "scenario");
  } else {
    r.fail(root, "", "expected a scenario mapping or a 'scenarios' list");
  }

  std::set<std::string> names;
  for (const auto& [node, path] : items) {
    r.require_map(node, path);
    Scenario s;
    std::string hash_text;
    if (node["base"]) {
      const std::string base = r.text(node["base"], path + ".base");
      if (!allow_base) r.fail(node["base"], path + ".base", "not allowed here");
      try {
        s = builtin_scenario(base);
      } catch (const ConfigError&) {
        r.fail(node["base"], path + ".base", "unknown built-in scenario '" + base + "'");
      }
      hash_text = builtin_yaml(base);
    }
    apply(r, node, path, s);
    validate(r, node, path, s);
    if (!names.insert(s.name).second) r.fail(node["name"], path + ".name", "duplicate scenario name '" + s.name + "'");
    s.line = node.Mark().is_null() ? 0 : node.Mark().line + 1;
    YAML::Emitter em;
    em << node;
    hash_text += em.c_str();
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(hash_text)));
    s.config_hash = buf;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Scenario> parse_config(const std::string& text, const std::string& source) {
  return parse_scenarios(text, source, true);
}

std::vector<Scenario> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), path);
}

}  // namespace mlab
