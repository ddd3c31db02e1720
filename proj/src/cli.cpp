#include "neklab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "neklab/conditions.hpp"
#include "neklab/diophantine.hpp"
#include "neklab/experiments.hpp"
#include "neklab/integrator.hpp"
#include "neklab/normal_form.hpp"

namespace neklab {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct Artifacts {
  fs::path dir;
  std::string format;
  std::string stem;

  void csv(const std::string& text) const {
    if (format != "csv") return;
    write(stem + ".csv", text);
  }
  void summary(json j) const {
    write(stem + ".json", j.dump(2) + "\n");
  }
  void write(const std::string& name, const std::string& text) const {
    fs::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << text;
    spdlog::info("wrote {}", (dir / name).string());
  }
};

json report_json(const DriftReport& r) {
  return {{"theta", r.theta},
          {"a", r.a},
          {"kappa", r.kappa},
          {"N", r.N},
          {"horizon", r.horizon},
          {"horizon_cap", r.horizon_cap},
          {"dt", r.dt},
          {"max_action_drift", r.max_action_drift},
          {"max_kappa_Lambda", r.max_kappa_Lambda},
          {"bound_K_theta", r.bound_K_theta},
          {"bound_kappa_Lambda", r.bound_kappa_Lambda},
          {"bound_passed", r.bound_passed},
          {"max_relative_energy_error", r.max_relative_energy_error},
          {"phases", r.phases}};
}

json conditions_json(const ConditionReport& rep) {
  json items = json::array();
  for (const auto& c : rep.items) {
    items.push_back({{"name", c.name}, {"relation", c.relation}, {"lhs", c.lhs}, {"rhs", c.rhs},
                     {"margin", c.margin}, {"passed", c.passed}});
  }
  return {{"lemma", rep.lemma}, {"passed", rep.passed()}, {"items", items}};
}

void print_conditions(std::ostream& out, const ConditionReport& rep) {
  out << "condition set " << rep.lemma << "\n";
  for (const auto& c : rep.items) {
    out << "  " << (c.passed ? "ok  " : "FAIL") << "  " << c.name << ": " << g6(c.lhs) << " " << c.relation << " "
        << g6(c.rhs) << "\n";
  }
}

void print_drift_header(std::ostream& out) {
  out << "theta      N   kappa         drift         bound         kappaLambda   bound         ok\n";
}

void print_drift(std::ostream& out, const DriftReport& r) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-10.4g %-3d %-13.5g %-13.5g %-13.5g %-13.5g %-13.5g %s\n", r.theta, r.N, r.kappa,
                r.max_action_drift, r.bound_K_theta, r.max_kappa_Lambda, r.bound_kappa_Lambda,
                r.bound_passed ? "yes" : "NO");
  out << buf;
}

double horizon_of(const RunConfig& cfg) { return std::min(cfg.numeric.horizon, cfg.numeric.T_max); }

StudyOptions study_options(const RunConfig& cfg) {
  StudyOptions opt;
  opt.seed = cfg.seed;
  opt.phases = cfg.numeric.phases;
  opt.kappa_lambda_fraction = cfg.experiment.kappa_lambda_fraction;
  opt.dt = cfg.numeric.dt;
  opt.workers = cfg.workers;
  return opt;
}

int run_dirichlet(const RunConfig& cfg, const Artifacts& art, std::ostream& out) {
  const auto& e = cfg.experiment;
  const PeriodicFrequency pf = periodic_frequency(e.omega, e.Q);
  const std::size_t n = e.omega.size();
  const double bound = std::pow(static_cast<double>(e.Q), -1.0 / static_cast<double>(n));
  const bool passed = n == 1 || pf.dirichlet.err <= bound;

  out << "q=" << pf.dirichlet.q << " T=" << g17(pf.T) << " omega0=(";
  for (std::size_t j = 0; j < n; ++j) out << (j ? ", " : "") << g17(pf.omega0[j]);
  out << ")\n";
  out << "err=" << g17(pf.dirichlet.err) << " bound Q^(-1/n)=" << g17(bound) << (passed ? "" : "  FAILED") << "\n";

  std::ostringstream csv;
  csv << "q,T,err,bound";
  for (std::size_t j = 0; j < n; ++j) csv << ",p_" << j + 1;
  for (std::size_t j = 0; j < n; ++j) csv << ",omega0_" << j + 1;
  csv << "\n" << pf.dirichlet.q << ',' << g17(pf.T) << ',' << g17(pf.dirichlet.err) << ',' << g17(bound);
  for (std::size_t j = 0; j < n; ++j) csv << ',' << (j < pf.dirichlet.p.size() ? pf.dirichlet.p[j] : 0);
  for (std::size_t j = 0; j < n; ++j) csv << ',' << g17(pf.omega0[j]);
  csv << "\n";
  art.csv(csv.str());
  art.summary({{"command", "dirichlet"},
               {"q", pf.dirichlet.q},
               {"p", pf.dirichlet.p},
               {"T", pf.T},
               {"omega0", pf.omega0},
               {"err", pf.dirichlet.err},
               {"bound", bound},
               {"passed", passed}});
  return passed ? kExitOk : kExitBoundFailed;
}

int run_normal_form(const RunConfig& cfg, const Artifacts& art, std::ostream& out) {
  const auto& e = cfg.experiment;
  SystemSpec spec = build_system(cfg.system);
  std::vector<double> frac = e.action_fractions;
  if (frac.empty()) frac.assign(spec.n, 1.0 / spec.n);
  double fs = 0.0;
  for (double f : frac) fs += f;
  std::vector<double> I_init(spec.n);
  for (int j = 0; j < spec.n; ++j) I_init[j] = e.theta * e.theta * frac[j] / fs;

  const PeriodicApproximation pa = approximate_periodic_orbit(spec.alpha, spec.A, I_init, e.a);
  const RecipeConstants rc = parameter_recipe(recipe_inputs(spec, e.theta, e.a, pa.tau));
  spec.kappa = rc.kappa;

  AveragingContext ctx;
  ctx.ambient = spec.ambient();
  ctx.omega0 = pa.omega0;
  ctx.T = pa.T;
  ctx.I0 = pa.I0;
  ctx.A = spec.A;
  ctx.kappa = rc.kappa;
  ctx.C_Lambda = spec.C_Lambda;
  ctx.r = {rc.r1, rc.r2, rc.r3};
  ctx.m = rc.m;
  ctx.degree_cap = cfg.numeric.degree_cap;
  const NormalFormResult nf = iterate_normal_form(ctx, spec.perturbation(), spec.Lambda);

  // Averaging by quadrature as a cross-check of the exact average of the first step.
  const QuadratureAverage qa = quadrature_average(spec.perturbation(), pa.omega0, pa.T, cfg.numeric.nodes);
  const Polynomial exact = resonant_average(spec.perturbation(), pa.omega0, pa.T);
  double quad_diff = 0.0;
  for (const auto& [ex, c] : (qa.average - exact).terms()) quad_diff = std::max(quad_diff, std::abs(c));

  bool halving = true;
  std::ostringstream csv;
  csv << "step,norm,half_previous,halved\n";
  out << "theta=" << e.theta << " tau=" << g6(pa.tau) << " T=" << g6(pa.T) << " m=" << rc.m << " kappa=" << g6(rc.kappa)
      << " r=(" << g6(rc.r1) << ", " << g6(rc.r2) << ", " << g6(rc.r3) << ")\n";
  for (std::size_t j = 0; j < nf.norms.size(); ++j) {
    const double half = j == 0 ? NAN : 0.5 * nf.norms[j - 1];
    const bool ok = j == 0 || nf.norms[j] <= half;
    halving = halving && ok;
    out << "  norm[" << j << "] = " << g6(nf.norms[j]) << (ok ? "" : "  (not halved)") << "\n";
    csv << j << ',' << g17(nf.norms[j]) << ',' << g17(half) << ',' << (ok ? "true" : "false") << "\n";
  }
  const double fhat = nf.norms.back();
  const bool final_ok = fhat <= nf.final_bound;
  out << "final norm " << g6(fhat) << " vs 2^-m eps = " << g6(nf.final_bound) << (final_ok ? "" : "  FAILED") << "\n";
  print_conditions(out, nf.conditions);
  if (!qa.nodes_sufficient) spdlog::warn("{}", qa.warning);
  art.csv(csv.str());
  const bool passed = halving && final_ok;
  art.summary({{"command", "normal-form"},
               {"theta", e.theta},
               {"a", e.a},
               {"tau", pa.tau},
               {"T", pa.T},
               {"omega0", pa.omega0},
               {"m", rc.m},
               {"kappa", rc.kappa},
               {"r", {rc.r1, rc.r2, rc.r3}},
               {"norms", nf.norms},
               {"final_bound", nf.final_bound},
               {"degree_cap", nf.degree_cap},
               {"quadrature_max_difference", quad_diff},
               {"quadrature_nodes_sufficient", qa.nodes_sufficient},
               {"conditions", conditions_json(nf.conditions)},
               {"halving_passed", halving},
               {"final_bound_passed", final_ok},
               {"passed", passed}});
  return passed ? kExitOk : kExitBoundFailed;
}

int run_drift(const RunConfig& cfg, const Artifacts& art, std::ostream& out) {
  const auto& e = cfg.experiment;
  SystemSpec spec = build_system(cfg.system);
  const RecipeConstants rc = parameter_recipe(recipe_inputs(spec, e.theta, e.a, kPi));
  spec.kappa = e.kappa ? *e.kappa : rc.kappa;
  PhasePoint init(spec.ambient());
  if (!e.z.empty()) {
    init.z = e.z;
    if (!e.zeta.empty()) init.zeta = e.zeta;
  } else {
    const double target = e.kappa_lambda_fraction * rc.C_E * std::pow(e.theta, 4 + 2 * e.a * spec.n);
    init = scaled_initial_point(spec, e.theta, std::vector<double>(spec.n, 1.0 / spec.n), target, cfg.seed,
                                cfg.seed + 1);
  }
  const double dt = cfg.numeric.dt > 0 ? cfg.numeric.dt : default_dt(spec);
  DriftReport r = measure_drift(spec, init, horizon_of(cfg), dt, {e.theta, e.a, rc.K});
  r.horizon_cap = cfg.numeric.T_max;
  print_drift_header(out);
  print_drift(out, r);
  out << "max relative energy error " << g6(r.max_relative_energy_error) << "\n";
  std::ostringstream csv;
  write_drift_csv(csv, {r});
  art.csv(csv.str());
  art.summary({{"command", "drift"}, {"K", rc.K}, {"report", report_json(r)}, {"passed", r.bound_passed}});
  return r.bound_passed ? kExitOk : kExitBoundFailed;
}

int run_constrained(const RunConfig& cfg, const Artifacts& art, std::ostream& out) {
  const auto& e = cfg.experiment;
  const SystemSpec spec = build_system(cfg.system);
  const ConvergenceReport rep =
      constrained_limit_study(spec, PhasePoint(e.z, e.zeta0), e.kappa_grid, horizon_of(cfg), cfg.numeric.dt,
                              cfg.workers);
  const bool slope_ok = std::isnan(rep.fitted_zeta_slope) || std::abs(rep.fitted_zeta_slope + 0.5) <= 0.1;
  const bool passed = rep.hypotheses.passed() && rep.distance_monotone && rep.kappa_lambda_monotone && slope_ok;
  out << "kappa         sup_distance  sup_kappaLambda  max_zeta\n";
  for (std::size_t i = 0; i < rep.kappa_grid.size(); ++i) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-13.5g %-13.5g %-16.5g %-13.5g\n", rep.kappa_grid[i], rep.sup_distance[i],
                  rep.sup_kappa_Lambda[i], rep.max_zeta[i]);
    out << buf;
  }
  out << "zeta slope " << g6(rep.fitted_zeta_slope) << ", distance monotone " << (rep.distance_monotone ? "yes" : "no")
      << ", kappaLambda monotone " << (rep.kappa_lambda_monotone ? "yes" : "no") << "\n";
  for (const auto& item : rep.hypotheses.items) {
    if (!item.passed) out << "hypothesis " << item.name << " fails: " << item.detail << "\n";
  }
  std::ostringstream csv;
  write_convergence_csv(csv, rep);
  art.csv(csv.str());
  json hyp = json::object();
  for (const auto& item : rep.hypotheses.items) hyp[item.name] = item.passed;
  art.summary({{"command", "constrained"},
               {"kappa_grid", rep.kappa_grid},
               {"sup_distance", rep.sup_distance},
               {"sup_kappa_Lambda", rep.sup_kappa_Lambda},
               {"max_zeta", rep.max_zeta},
               {"max_relative_energy_error", rep.max_relative_energy_error},
               {"fitted_zeta_slope", rep.fitted_zeta_slope},
               {"distance_monotone", rep.distance_monotone},
               {"kappa_lambda_monotone", rep.kappa_lambda_monotone},
               {"hypotheses", hyp},
               {"passed", passed}});
  return passed ? kExitOk : kExitBoundFailed;
}

int run_small_kappa(const RunConfig& cfg, const Artifacts& art, std::ostream& out) {
  const auto& e = cfg.experiment;
  std::vector<SystemSpec> bases;
  for (int N : e.N_values) bases.push_back(build_system(cfg.system, N));
  HorizonRule rule;
  rule.kind = e.horizon_rule == "recipe" ? HorizonRule::Kind::recipe : HorizonRule::Kind::fixed;
  rule.value = cfg.numeric.horizon;
  rule.T_max = cfg.numeric.T_max;
  const SmallKappaStudy st = smallkappa_scaling_study(bases, e.theta_grid, e.a, rule, study_options(cfg));

  bool uniform = true;
  if (bases.size() > 1) {
    for (double r : st.n_uniformity_ratio) uniform = uniform && r < 2.0;
  }
  const bool slope_ok = e.theta_grid.size() < 2 || st.fitted_drift_exponent >= 2.0;
  const bool passed = st.all_bounds_passed && slope_ok && uniform;

  std::vector<DriftReport> rows;
  print_drift_header(out);
  for (const auto& row : st.reports) {
    for (const auto& r : row) {
      print_drift(out, r);
      rows.push_back(r);
    }
  }
  out << "K=" << g6(st.K) << " drift exponent " << g6(st.fitted_drift_exponent) << " (needs >= 2)";
  if (bases.size() > 1) {
    double worst = 0.0;
    for (double r : st.n_uniformity_ratio) worst = std::max(worst, r);
    out << ", worst N ratio " << g6(worst) << " (needs < 2)";
  }
  out << "\n";
  std::ostringstream csv;
  write_drift_csv(csv, rows);
  art.csv(csv.str());
  json reports = json::array();
  for (const auto& r : rows) reports.push_back(report_json(r));
  art.summary({{"command", "small-kappa"},
               {"K", st.K},
               {"theta_grid", st.theta_grid},
               {"N_values", e.N_values},
               {"drift_slopes", st.drift_slopes},
               {"fitted_drift_exponent", st.fitted_drift_exponent},
               {"n_uniformity_ratio", st.n_uniformity_ratio},
               {"all_bounds_passed", st.all_bounds_passed},
               {"exponent_passed", slope_ok},
               {"n_uniformity_passed", uniform},
               {"reports", reports},
               {"passed", passed}});
  return passed ? kExitOk : kExitBoundFailed;
}

int run_variant(const RunConfig& cfg, const Artifacts& art, std::ostream& out) {
  const auto& e = cfg.experiment;
  const SystemSpec spec = build_system(cfg.system);
  const RecipeConstants rc = parameter_recipe(recipe_inputs(spec, e.theta, e.a, kPi));
  std::vector<double> grid;
  for (double f : e.kappa_fractions) grid.push_back(f * rc.kappa);
  HorizonRule rule{HorizonRule::Kind::fixed, cfg.numeric.horizon, cfg.numeric.T_max};
  const auto reports = variant_scaling_study(spec, e.theta, e.a, grid, rule, study_options(cfg));
  bool passed = true;
  print_drift_header(out);
  json rows = json::array();
  for (const auto& r : reports) {
    print_drift(out, r);
    passed = passed && r.bound_passed;
    rows.push_back(report_json(r));
  }
  std::ostringstream csv;
  write_drift_csv(csv, reports);
  art.csv(csv.str());
  art.summary({{"command", "variant"},
               {"K", rc.K},
               {"kappa_max", rc.kappa},
               {"r3_at_kappa", [&] {
                  json r3 = json::array();
                  for (double k : grid) r3.push_back(variant_r3(rc.P, e.theta, e.a, k));
                  return r3;
                }()},
               {"reports", rows},
               {"passed", passed}});
  return passed ? kExitOk : kExitBoundFailed;
}

int run_check(const RunConfig& cfg, const Artifacts& art, std::ostream& out) {
  const auto& e = cfg.experiment;
  const Lemma lemma = lemma_from_name(e.lemma);
  ConditionReport rep;
  json extra = json::object();
  if (!e.inputs.empty()) {
    rep = check_conditions(lemma, e.inputs);
  } else {
    if (lemma != Lemma::local_stability_small_kappa) {
      throw ConfigError({"experiment.inputs: required unless lemma is local_stability_small_kappa"});
    }
    const SystemSpec spec = build_system(cfg.system);
    RecipeInputs in = recipe_inputs(spec, e.theta, e.a, e.tau);
    if (e.theta_auto) {
      in.theta = recipe_threshold_theta(in);
      if (!(in.theta > 0)) {
        out << "no theta down to 1e-50 satisfies the recipe conditions\n";
        art.summary({{"command", "check-conditions"}, {"theta", 0.0}, {"passed", false}});
        return kExitBoundFailed;
      }
      out << "theta (auto) = " << g17(in.theta) << "\n";
    }
    const RecipeConstants rc = parameter_recipe(in);
    rep = check_conditions(lemma, small_kappa_inputs(in, rc));
    extra = {{"theta", in.theta}, {"tau", in.tau}, {"K", rc.K}, {"C_E", rc.C_E}, {"m", rc.m}};
  }
  print_conditions(out, rep);
  std::ostringstream csv;
  csv << "name,relation,lhs,rhs,margin,passed\n";
  for (const auto& c : rep.items) {
    csv << '"' << c.name << "\"," << c.relation << ',' << g17(c.lhs) << ',' << g17(c.rhs) << ',' << g17(c.margin) << ','
        << (c.passed ? "true" : "false") << "\n";
  }
  art.csv(csv.str());
  json s = {{"command", "check-conditions"}, {"conditions", conditions_json(rep)}, {"passed", rep.passed()}};
  s.update(extra);
  art.summary(s);
  return rep.passed() ? kExitOk : kExitBoundFailed;
}

std::string command_name(ExperimentType t) {
  switch (t) {
    case ExperimentType::normalform: return "normal-form";
    case ExperimentType::smallkappa: return "small-kappa";
    case ExperimentType::check: return "check-conditions";
    default: return experiment_name(t);
  }
}

void configure_logging() {
  auto logger = spdlog::get("neklab");
  if (!logger) {
    logger = spdlog::stderr_color_mt("neklab");
    logger->set_pattern("[%l] %v");
  }
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("NEKLAB_LOG")) {
    const std::string v = env;
    if (v == "error") {
      spdlog::set_level(spdlog::level::err);
    } else if (v == "debug") {
      spdlog::set_level(spdlog::level::debug);
    } else if (v != "info") {
      spdlog::warn("NEKLAB_LOG='{}' is not one of error, info, debug; using info", v);
    }
  }
}

}  // namespace

std::optional<ExperimentType> command_experiment(const std::string& command) {
  for (auto t : {ExperimentType::dirichlet, ExperimentType::normalform, ExperimentType::drift,
                 ExperimentType::constrained, ExperimentType::smallkappa, ExperimentType::variant,
                 ExperimentType::check}) {
    if (command_name(t) == command) return t;
  }
  return std::nullopt;
}

int run_experiment(const RunConfig& cfg, std::ostream& out) {
  const std::string cmd = command_name(cfg.experiment.type);
  const Artifacts art{cfg.output.directory, cfg.output.format, cmd};
  spdlog::debug("configuration:\n{}", serialize_config(cfg));
  switch (cfg.experiment.type) {
    case ExperimentType::dirichlet: return run_dirichlet(cfg, art, out);
    case ExperimentType::normalform: return run_normal_form(cfg, art, out);
    case ExperimentType::drift: return run_drift(cfg, art, out);
    case ExperimentType::constrained: return run_constrained(cfg, art, out);
    case ExperimentType::smallkappa: return run_small_kappa(cfg, art, out);
    case ExperimentType::variant: return run_variant(cfg, art, out);
    case ExperimentType::check: return run_check(cfg, art, out);
  }
  return kExitConfig;
}

int cli_main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Normal forms and stability experiments for Hamiltonians with an elliptic fixed point"};
  app.require_subcommand(1);
  std::string config_path, output_dir;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--output", output_dir, "directory for CSV and JSON artifacts");
  app.add_option("--workers", workers, "worker threads (0 = available parallelism)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "seed for sampled initial phases");
  app.fallthrough();
  const std::pair<const char*, const char*> commands[] = {
      {"dirichlet", "best simultaneous approximation and periodic frequency"},
      {"normal-form", "averaging iteration with recipe parameters"},
      {"drift", "action drift of one orbit"},
      {"constrained", "large-kappa limit study"},
      {"small-kappa", "small-kappa scaling study"},
      {"variant", "small-kappa variant below the largest kappa"},
      {"check-conditions", "evaluate a condition set"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  const ExperimentType type = *command_experiment(command);

  try {
    std::string text = "{}";
    if (!config_path.empty()) {
      std::ifstream is(config_path, std::ios::binary);
      std::ostringstream ss;
      ss << is.rdbuf();
      text = ss.str();
    }
    RunConfig cfg = parse_config(text, type);
    if (!output_dir.empty()) cfg.output.directory = output_dir;
    if (workers) cfg.workers = *workers;
    if (seed) cfg.seed = *seed;

    const auto t0 = std::chrono::system_clock::now();
    const int code = run_experiment(cfg, std::cout);
    const double secs = std::chrono::duration<double>(std::chrono::system_clock::now() - t0).count();
    // Timestamps live only in this sidecar so the other artifacts stay reproducible.
    json meta = {{"command", command},
                 {"started_unix", std::chrono::duration<double>(t0.time_since_epoch()).count()},
                 {"elapsed_seconds", secs},
                 {"exit_code", code},
                 {"config", json::parse(serialize_config(cfg))}};
    Artifacts{cfg.output.directory, cfg.output.format, command}.write(command + ".meta.json", meta.dump(2) + "\n");
    spdlog::info("{} finished in {:.2f} s with exit code {}", command, secs, code);
    return code;
  } catch (const ConfigError& e) {
    for (const auto& msg : e.errors()) std::cerr << "config error: " << msg << "\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    // PreconditionError and DimensionError: the inputs do not meet an operation's requirements.
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBoundFailed;
  }
}

}  // namespace neklab
