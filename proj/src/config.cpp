#include "neklab/config.hpp"

#include <json.hpp>
#include <set>
#include <sstream>

#include "neklab/conditions.hpp"
#include "neklab/experiments.hpp"

namespace neklab {

using json = nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& e : v) s += (s.empty() ? "" : "; ") + e;
  return s;
}

// Walks one JSON object, recording type errors and the keys it has seen.
class Section {
 public:
  Section(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {}

  bool has(const std::string& key) const { return j_.contains(key); }

  void number(const std::string& key, double& out, bool required = false) {
    const json* v = get(key, required);
    if (!v) return;
    if (v->is_number()) {
      out = v->get<double>();
    } else {
      error(key, "must be a number");
    }
  }
  template <class Int>
  void integer(const std::string& key, Int& out, bool required = false) {
    const json* v = get(key, required);
    if (!v) return;
    if (v->is_number_unsigned() || v->is_number_integer()) {
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_integer() && !v->is_number_unsigned()) {
          error(key, "must be a non-negative integer");
          return;
        }
        out = v->get<Int>();
      } else {
        out = static_cast<Int>(v->get<std::int64_t>());
      }
    } else {
      error(key, "must be an integer");
    }
  }
  void boolean(const std::string& key, bool& out) {
    const json* v = get(key, false);
    if (!v) return;
    if (v->is_boolean()) {
      out = v->get<bool>();
    } else {
      error(key, "must be true or false");
    }
  }
  void string(const std::string& key, std::string& out, bool required = false) {
    const json* v = get(key, required);
    if (!v) return;
    if (v->is_string()) {
      out = v->get<std::string>();
    } else {
      error(key, "must be a string");
    }
  }
  template <class T>
  void list(const std::string& key, std::vector<T>& out, bool required = false) {
    const json* v = get(key, required);
    if (!v) return;
    std::vector<T> tmp;
    if (v->is_array()) {
      for (const auto& e : *v) {
        const bool ok = std::is_integral_v<T> ? (e.is_number_integer() || e.is_number_unsigned()) : e.is_number();
        if (!ok) {
          error(key, std::is_integral_v<T> ? "must be a list of integers" : "must be a list of numbers");
          return;
        }
        tmp.push_back(e.get<T>());
      }
      out = std::move(tmp);
    } else {
      error(key, std::is_integral_v<T> ? "must be a list of integers" : "must be a list of numbers");
    }
  }
  void matrix(const std::string& key, std::vector<std::vector<double>>& out, bool required = false) {
    const json* v = get(key, required);
    if (!v) return;
    std::vector<std::vector<double>> tmp;
    bool ok = v->is_array();
    if (ok) {
      for (const auto& row : *v) {
        ok = ok && row.is_array();
        if (!ok) break;
        std::vector<double> r;
        for (const auto& e : row) {
          ok = ok && e.is_number();
          if (ok) r.push_back(e.get<double>());
        }
        tmp.push_back(std::move(r));
      }
    }
    if (ok) {
      out = std::move(tmp);
    } else {
      error(key, "must be a list of rows of numbers");
    }
  }
  void number_map(const std::string& key, std::map<std::string, double>& out) {
    const json* v = get(key, false);
    if (!v) return;
    if (!v->is_object()) {
      error(key, "must be an object of numbers");
      return;
    }
    for (const auto& [k, e] : v->items()) {
      if (e.is_number()) {
        out[k] = e.get<double>();
      } else {
        error(key + "." + k, "must be a number");
      }
    }
  }
  const json* sub(const std::string& key) {
    const json* v = get(key, false);
    if (v && !v->is_object()) {
      error(key, "must be an object");
      return nullptr;
    }
    return v;
  }
  void mark(const std::string& key) { seen_.insert(key); }

  void error(const std::string& key, const std::string& msg) { errors_.push_back(at(key) + ": " + msg); }
  void check(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) error(key, msg);
  }

  // Reports every key that no reader asked for.
  void finish() {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) errors_.push_back(at(k) + ": unknown key");
    }
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json* get(const std::string& key, bool required) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) {
      if (required) errors_.push_back(at(key) + ": missing required field");
      return nullptr;
    }
    return &*it;
  }

  const json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void read_system(const json& j, SystemConfig& s, std::vector<std::string>& errors) {
  Section sec(j, "system", errors);
  sec.string("preset", s.preset);
  sec.integer("N", s.N);
  sec.number("kappa", s.kappa);
  sec.number("sample_radius_z", s.sample_radius_z);
  sec.number("sample_radius_zeta", s.sample_radius_zeta);
  if (s.preset == "desk") {
    sec.boolean("coupling", s.coupling);
    sec.boolean("kappa_term", s.kappa_term);
    s.n = 2;
  } else if (s.preset == "custom") {
    sec.integer("n", s.n, true);
    sec.list("alpha", s.alpha, true);
    sec.matrix("A", s.A, true);
    sec.list("I0", s.I0);
    sec.string("f", s.f);
    sec.string("f_kappa", s.f_kappa);
    sec.string("Lambda", s.Lambda);
    sec.number("M", s.M);
    sec.number("C_Lambda", s.C_Lambda);
    sec.number("C0", s.C0);
    sec.check(s.n >= 1, "n", "must be >= 1");
  } else {
    sec.error("preset", "must be \"desk\" or \"custom\"");
  }
  sec.check(s.N >= 0, "N", "must be >= 0");
  sec.check(s.kappa >= 0, "kappa", "kappa must be ≥ 0");
  sec.check(s.sample_radius_z > 0, "sample_radius_z", "must be > 0");
  sec.check(s.sample_radius_zeta > 0, "sample_radius_zeta", "must be > 0");
  sec.finish();
}

void read_experiment(const json& j, ExperimentConfig& e, std::optional<ExperimentType> fallback,
                     std::vector<std::string>& errors) {
  Section sec(j, "experiment", errors);
  std::string type;
  sec.string("type", type, !fallback);
  if (!type.empty()) {
    const auto t = experiment_from_name(type);
    if (!t) {
      sec.error("type", "unknown experiment type '" + type + "'");
      return;
    }
    if (fallback && *t != *fallback) {
      sec.error("type", "is '" + type + "' but the command runs '" + experiment_name(*fallback) + "'");
      return;
    }
    e.type = *t;
  } else if (fallback) {
    e.type = *fallback;
  } else {
    return;
  }

  auto theta_a = [&] {
    sec.number("theta", e.theta);
    sec.number("a", e.a);
    sec.check(e.theta > 0, "theta", "must be positive");
    sec.check(e.a > 0, "a", "must be positive");
  };
  auto fraction = [&] {
    sec.number("kappa_lambda_fraction", e.kappa_lambda_fraction);
    sec.check(e.kappa_lambda_fraction >= 0, "kappa_lambda_fraction", "must be >= 0");
  };
  switch (e.type) {
    case ExperimentType::dirichlet:
      sec.list("omega", e.omega, true);
      sec.integer("Q", e.Q, true);
      sec.check(sec.has("omega") == false || !e.omega.empty(), "omega", "must not be empty");
      sec.check(!sec.has("Q") || e.Q >= 1, "Q", "must be >= 1");
      break;
    case ExperimentType::normalform:
      theta_a();
      sec.list("action_fractions", e.action_fractions);
      break;
    case ExperimentType::drift:
      theta_a();
      sec.list("z", e.z);
      sec.list("zeta", e.zeta);
      if (sec.has("kappa")) {
        double k = 0;
        sec.number("kappa", k);
        e.kappa = k;
        sec.check(k >= 0, "kappa", "kappa must be ≥ 0");
      }
      fraction();
      break;
    case ExperimentType::constrained:
      sec.list("kappa_grid", e.kappa_grid);
      sec.list("z", e.z, true);
      sec.list("zeta0", e.zeta0, true);
      sec.check(!e.kappa_grid.empty(), "kappa_grid", "must not be empty");
      for (double k : e.kappa_grid) sec.check(k > 0, "kappa_grid", "entries must be positive");
      break;
    case ExperimentType::smallkappa:
      sec.number("a", e.a);
      sec.check(e.a > 0, "a", "must be positive");
      sec.list("theta_grid", e.theta_grid);
      sec.list("N_values", e.N_values);
      sec.string("horizon_rule", e.horizon_rule);
      fraction();
      sec.check(!e.theta_grid.empty(), "theta_grid", "must not be empty");
      for (double t : e.theta_grid) sec.check(t > 0, "theta_grid", "entries must be positive");
      for (int N : e.N_values) sec.check(N >= 0, "N_values", "entries must be >= 0");
      sec.check(e.horizon_rule == "fixed" || e.horizon_rule == "recipe", "horizon_rule",
                "must be \"fixed\" or \"recipe\"");
      break;
    case ExperimentType::variant:
      theta_a();
      sec.list("kappa_fractions", e.kappa_fractions);
      fraction();
      sec.check(!e.kappa_fractions.empty(), "kappa_fractions", "must not be empty");
      for (double f : e.kappa_fractions) sec.check(f > 0 && f <= 1, "kappa_fractions", "entries must lie in (0, 1]");
      break;
    case ExperimentType::check: {
      sec.string("lemma", e.lemma);
      try {
        lemma_from_name(e.lemma);
      } catch (const std::exception&) {
        sec.error("lemma", "unknown condition set '" + e.lemma + "'");
      }
      if (sec.has("theta") && j.at("theta").is_string()) {
        sec.mark("theta");
        e.theta_auto = j.at("theta") == "auto";
        sec.check(e.theta_auto, "theta", "must be a number or \"auto\"");
      } else {
        sec.number("theta", e.theta);
        sec.check(e.theta > 0, "theta", "must be positive");
      }
      sec.number("a", e.a);
      sec.number("tau", e.tau);
      sec.number_map("inputs", e.inputs);
      sec.check(e.a > 0, "a", "must be positive");
      break;
    }
  }
  sec.finish();
}

void read_numeric(const json& j, NumericConfig& n, std::vector<std::string>& errors) {
  Section sec(j, "numeric", errors);
  sec.number("dt", n.dt);
  sec.number("horizon", n.horizon);
  sec.number("T_max", n.T_max);
  sec.integer("degree_cap", n.degree_cap);
  sec.integer("nodes", n.nodes);
  sec.integer("phases", n.phases);
  sec.check(n.dt >= 0, "dt", "must be >= 0");
  sec.check(n.horizon > 0, "horizon", "must be positive");
  sec.check(n.T_max > 0, "T_max", "must be positive");
  sec.check(n.degree_cap >= 0, "degree_cap", "must be >= 0");
  sec.check(n.nodes >= 1, "nodes", "must be >= 1");
  sec.check(n.phases >= 1, "phases", "must be >= 1");
  sec.finish();
}

void read_output(const json& j, OutputConfig& o, std::vector<std::string>& errors) {
  Section sec(j, "output", errors);
  sec.string("directory", o.directory);
  sec.string("format", o.format);
  sec.check(!o.directory.empty(), "directory", "must not be empty");
  sec.check(o.format == "csv" || o.format == "json", "format", "must be \"csv\" or \"json\"");
  sec.finish();
}

// Dimension checks that need the system.
void cross_check(const RunConfig& cfg, std::vector<std::string>& errors) {
  SystemSpec spec;
  try {
    spec = build_system(cfg.system);
  } catch (const ConfigError& e) {
    errors.insert(errors.end(), e.errors().begin(), e.errors().end());
    return;
  }
  const auto& e = cfg.experiment;
  auto size_is = [&](const std::vector<double>& v, std::size_t want, const std::string& key, bool allow_empty) {
    if ((allow_empty && v.empty()) || v.size() == want) return;
    errors.push_back("experiment." + key + ": expected " + std::to_string(want) + " entries, got " +
                     std::to_string(v.size()));
  };
  switch (e.type) {
    case ExperimentType::normalform:
      size_is(e.action_fractions, spec.n, "action_fractions", true);
      break;
    case ExperimentType::drift:
      size_is(e.z, 2 * spec.n, "z", true);
      size_is(e.zeta, 2 * spec.N, "zeta", true);
      if (e.z.empty() && !e.zeta.empty()) errors.push_back("experiment.zeta: given without z");
      break;
    case ExperimentType::constrained:
      size_is(e.z, 2 * spec.n, "z", false);
      size_is(e.zeta0, 2 * spec.N, "zeta0", false);
      break;
    case ExperimentType::smallkappa:
      if (cfg.system.preset != "desk" && !(e.N_values.size() == 1 && e.N_values[0] == cfg.system.N)) {
        errors.push_back("experiment.N_values: a custom system runs only at its own N");
      }
      break;
    default:
      break;
  }
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error("invalid configuration: " + join(errors)), errors_(std::move(errors)) {}

std::string experiment_name(ExperimentType t) {
  switch (t) {
    case ExperimentType::dirichlet: return "dirichlet";
    case ExperimentType::normalform: return "normalform";
    case ExperimentType::drift: return "drift";
    case ExperimentType::constrained: return "constrained";
    case ExperimentType::smallkappa: return "smallkappa";
    case ExperimentType::variant: return "variant";
    case ExperimentType::check: return "check";
  }
  return "";
}

std::optional<ExperimentType> experiment_from_name(const std::string& name) {
  for (auto t : {ExperimentType::dirichlet, ExperimentType::normalform, ExperimentType::drift,
                 ExperimentType::constrained, ExperimentType::smallkappa, ExperimentType::variant,
                 ExperimentType::check}) {
    if (experiment_name(t) == name) return t;
  }
  return std::nullopt;
}

RunConfig parse_config(const std::string& text, std::optional<ExperimentType> fallback) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    // Drop the library's "[json.exception.parse_error.101] parse error at line x, column y: " prefix.
    if (auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
    throw ConfigError({"parse error at " + line_column(text, e.byte) + ": " + what});
  }
  if (!doc.is_object()) throw ConfigError({"top level must be an object"});

  RunConfig cfg;
  std::vector<std::string> errors;
  Section top(doc, "", errors);
  if (const json* s = top.sub("system")) read_system(*s, cfg.system, errors);
  if (const json* e = top.sub("experiment")) {
    read_experiment(*e, cfg.experiment, fallback, errors);
  } else if (fallback) {
    read_experiment(json::object(), cfg.experiment, fallback, errors);
  } else {
    errors.push_back("experiment: missing required field");
  }
  if (const json* n = top.sub("numeric")) read_numeric(*n, cfg.numeric, errors);
  if (const json* o = top.sub("output")) read_output(*o, cfg.output, errors);
  top.integer("seed", cfg.seed);
  top.integer("workers", cfg.workers);
  top.check(cfg.workers >= 0, "workers", "must be >= 0");
  top.finish();
  if (errors.empty()) cross_check(cfg, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  const auto& s = cfg.system;
  json sys{{"preset", s.preset},
           {"N", s.N},
           {"kappa", s.kappa},
           {"sample_radius_z", s.sample_radius_z},
           {"sample_radius_zeta", s.sample_radius_zeta}};
  if (s.preset == "desk") {
    sys["coupling"] = s.coupling;
    sys["kappa_term"] = s.kappa_term;
  } else {
    sys["n"] = s.n;
    sys["alpha"] = s.alpha;
    sys["A"] = s.A;
    sys["I0"] = s.I0;
    sys["f"] = s.f;
    sys["f_kappa"] = s.f_kappa;
    sys["Lambda"] = s.Lambda;
    sys["M"] = s.M;
    sys["C_Lambda"] = s.C_Lambda;
    sys["C0"] = s.C0;
  }
  j["system"] = sys;

  const auto& e = cfg.experiment;
  json ex{{"type", experiment_name(e.type)}};
  switch (e.type) {
    case ExperimentType::dirichlet:
      ex["omega"] = e.omega;
      ex["Q"] = e.Q;
      break;
    case ExperimentType::normalform:
      ex["theta"] = e.theta;
      ex["a"] = e.a;
      ex["action_fractions"] = e.action_fractions;
      break;
    case ExperimentType::drift:
      ex["theta"] = e.theta;
      ex["a"] = e.a;
      ex["z"] = e.z;
      ex["zeta"] = e.zeta;
      if (e.kappa) ex["kappa"] = *e.kappa;
      ex["kappa_lambda_fraction"] = e.kappa_lambda_fraction;
      break;
    case ExperimentType::constrained:
      ex["kappa_grid"] = e.kappa_grid;
      ex["z"] = e.z;
      ex["zeta0"] = e.zeta0;
      break;
    case ExperimentType::smallkappa:
      ex["a"] = e.a;
      ex["theta_grid"] = e.theta_grid;
      ex["N_values"] = e.N_values;
      ex["horizon_rule"] = e.horizon_rule;
      ex["kappa_lambda_fraction"] = e.kappa_lambda_fraction;
      break;
    case ExperimentType::variant:
      ex["theta"] = e.theta;
      ex["a"] = e.a;
      ex["kappa_fractions"] = e.kappa_fractions;
      ex["kappa_lambda_fraction"] = e.kappa_lambda_fraction;
      break;
    case ExperimentType::check:
      ex["lemma"] = e.lemma;
      ex["theta"] = e.theta_auto ? json("auto") : json(e.theta);
      ex["a"] = e.a;
      ex["tau"] = e.tau;
      ex["inputs"] = e.inputs.empty() ? json::object() : json(e.inputs);
      break;
  }
  j["experiment"] = ex;

  const auto& n = cfg.numeric;
  j["numeric"] = {{"dt", n.dt},         {"horizon", n.horizon}, {"T_max", n.T_max},
                  {"degree_cap", n.degree_cap}, {"nodes", n.nodes},     {"phases", n.phases}};
  j["output"] = {{"directory", cfg.output.directory}, {"format", cfg.output.format}};
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  return j.dump(2) + "\n";
}

SystemSpec build_system(const SystemConfig& sys) { return build_system(sys, sys.N); }

SystemSpec build_system(const SystemConfig& sys, int N) {
  if (sys.preset == "desk") {
    SystemSpec s = desk_system({N, sys.coupling, sys.kappa_term, sys.kappa});
    s.sample_radius_z = sys.sample_radius_z;
    s.sample_radius_zeta = sys.sample_radius_zeta;
    return s;
  }
  std::vector<std::string> errors;
  SystemSpec s;
  s.n = sys.n;
  s.N = N;
  const Ambient amb = s.ambient();
  s.alpha = sys.alpha;
  if (static_cast<int>(sys.alpha.size()) != sys.n) errors.push_back("system.alpha: expected n entries");
  s.A = Eigen::MatrixXd::Zero(sys.n, sys.n);
  if (static_cast<int>(sys.A.size()) != sys.n) {
    errors.push_back("system.A: expected n rows");
  } else {
    for (int i = 0; i < sys.n; ++i) {
      if (static_cast<int>(sys.A[i].size()) != sys.n) {
        errors.push_back("system.A: row " + std::to_string(i + 1) + " must have n entries");
        continue;
      }
      for (int k = 0; k < sys.n; ++k) s.A(i, k) = sys.A[i][k];
    }
  }
  s.I0 = sys.I0.empty() ? std::vector<double>(sys.n, 0.0) : sys.I0;
  if (static_cast<int>(s.I0.size()) != sys.n) errors.push_back("system.I0: expected n entries");
  auto poly = [&](const std::string& key, const std::string& text, Polynomial& out) {
    try {
      out = parse_polynomial(text, amb);
    } catch (const ParseError& e) {
      errors.push_back("system." + key + ": " + e.what() + " (offset " + std::to_string(e.position()) + ")");
    } catch (const std::exception& e) {
      errors.push_back("system." + key + ": " + e.what());
    }
  };
  poly("f", sys.f, s.f);
  poly("f_kappa", sys.f_kappa, s.f_kappa);
  poly("Lambda", sys.Lambda, s.Lambda);
  s.kappa = sys.kappa;
  s.M = sys.M;
  s.C_Lambda = sys.C_Lambda;
  s.C0 = sys.C0;
  s.sample_radius_z = sys.sample_radius_z;
  s.sample_radius_zeta = sys.sample_radius_zeta;
  if (errors.empty()) {
    try {
      s.validate();
    } catch (const std::exception& e) {
      errors.push_back(std::string("system: ") + e.what());
    }
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return s;
}

}  // namespace neklab
