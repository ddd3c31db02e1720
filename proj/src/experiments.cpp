#include "neklab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

#include "neklab/diophantine.hpp"
#include "neklab/integrator.hpp"

namespace neklab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::mt19937_64 make_rng(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  for (std::uint64_t p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

// Sup of the observables along the orbit through init over [-horizon, horizon].
struct OrbitSup {
  double drift = 0.0;
  double kappa_lambda = 0.0;
  double energy = 0.0;
};

OrbitSup sweep_orbit(const SystemSpec& spec, const PhasePoint& init, double horizon, double dt) {
  const Polynomial H = total_hamiltonian(spec);
  HamiltonianFlow flow(H);
  const Polynomial polys[] = {H, spec.Lambda};
  CompiledPolynomials obs(polys, spec.ambient().nvars());
  const ActionVector I0 = actions(init);
  const int n = spec.n;
  double vals[2];
  obs.evaluate(init.flat(), vals);
  const double E0 = vals[0];
  const double Escale = std::max(std::abs(E0), 1e-300);

  OrbitSup sup;
  auto observe = [&](double, const std::vector<double>& x) {
    double d = 0.0;
    for (int j = 0; j < n; ++j) d += std::abs(0.5 * (x[j] * x[j] + x[n + j] * x[n + j]) - I0[j]);
    sup.drift = std::max(sup.drift, d);
    obs.evaluate(x, vals);
    sup.kappa_lambda = std::max(sup.kappa_lambda, spec.kappa * vals[1]);
    sup.energy = std::max(sup.energy, std::abs(vals[0] - E0) / Escale);
  };
  propagate(flow, init.flat(), horizon, dt, observe);
  propagate(flow, init.flat(), -horizon, dt, observe);
  return sup;
}

DriftReport drift_report(const SystemSpec& spec, const PhasePoint& init, double horizon, double dt,
                         const DriftBound& bound) {
  DriftReport r;
  r.theta = bound.theta;
  r.a = bound.a;
  r.kappa = spec.kappa;
  r.N = spec.N;
  r.horizon = horizon;
  r.horizon_cap = horizon;
  r.dt = dt;
  const OrbitSup s = sweep_orbit(spec, init, horizon, dt);
  r.max_action_drift = s.drift;
  r.max_kappa_Lambda = s.kappa_lambda;
  r.max_relative_energy_error = s.energy;
  r.bound_K_theta = bound.K * std::pow(bound.theta, 2.0 + bound.a);
  r.bound_kappa_Lambda = bound.K * std::pow(bound.theta, 4.0 + 2.0 * bound.a);
  r.bound_passed = r.max_action_drift <= r.bound_K_theta && r.max_kappa_Lambda <= r.bound_kappa_Lambda;
  return r;
}

void require_hypotheses(const SystemSpec& spec) {
  const HypothesisReport rep = check_structural_hypotheses(spec);
  for (const auto& item : rep.items) {
    if (!item.passed) throw PreconditionError("structural hypothesis '" + item.name + "' fails: " + item.detail);
  }
}

// Merges per-phase reports of one grid point into their worst case.
DriftReport worst_case(const std::vector<DriftReport>& runs) {
  DriftReport r = runs.front();
  for (const auto& x : runs) {
    r.max_action_drift = std::max(r.max_action_drift, x.max_action_drift);
    r.max_kappa_Lambda = std::max(r.max_kappa_Lambda, x.max_kappa_Lambda);
    r.max_relative_energy_error = std::max(r.max_relative_energy_error, x.max_relative_energy_error);
  }
  r.phases = static_cast<int>(runs.size());
  r.bound_passed = r.max_action_drift <= r.bound_K_theta && r.max_kappa_Lambda <= r.bound_kappa_Lambda;
  return r;
}

std::vector<double> fractions_for(const StudyOptions& opt, int n) {
  if (opt.action_fractions.empty()) return std::vector<double>(n, 1.0 / n);
  if (static_cast<int>(opt.action_fractions.size()) != n) {
    throw DimensionError("action_fractions must have one entry per degree of freedom");
  }
  double s = 0.0;
  for (double f : opt.action_fractions) {
    if (f < 0) throw PreconditionError("action_fractions must be non-negative");
    s += f;
  }
  if (!(s > 0)) throw PreconditionError("action_fractions must not all vanish");
  std::vector<double> out = opt.action_fractions;
  for (double& f : out) f /= s;
  return out;
}

// Initial point of phase sample p. The torus phase depends only on (seed, p) so that
// bases with different N share their z initial data.
PhasePoint phase_initial(const SystemSpec& spec, double theta, double a, double C_E, const StudyOptions& opt,
                         std::size_t p) {
  const double target = opt.kappa_lambda_fraction * C_E * std::pow(theta, 4.0 + 2.0 * a * spec.n);
  return scaled_initial_point(spec, theta, fractions_for(opt, spec.n), target, opt.seed + 0x9e3779b97f4a7c15ULL * (p + 1),
                              opt.seed + 0xbf58476d1ce4e5b9ULL * (p + 1) + spec.N);
}

std::vector<DriftReport> run_phases(const SystemSpec& spec, double theta, double a, double horizon, double cap,
                                    double K, double C_E, const StudyOptions& opt) {
  const double dt = opt.dt > 0 ? opt.dt : default_dt(spec);
  std::vector<DriftReport> out(opt.phases);
  parallel_for(out.size(), opt.workers, [&](std::size_t p) {
    out[p] = drift_report(spec, phase_initial(spec, theta, a, C_E, opt, p), horizon, dt, {theta, a, K});
    out[p].horizon_cap = cap;
  });
  return out;
}

}  // namespace

SystemSpec desk_system(const DeskOptions& opt) {
  if (opt.N < 0) throw PreconditionError("desk_system: N must be >= 0");
  SystemSpec s;
  s.n = 2;
  s.N = opt.N;
  const Ambient amb = s.ambient();
  s.alpha = {1.0, 0.5 * (1.0 + std::sqrt(5.0))};
  s.A = Eigen::MatrixXd::Identity(2, 2);
  s.I0 = {0.0, 0.0};
  s.M = 2.0;
  s.C_Lambda = 1.0;
  s.C0 = 0.5;
  s.kappa = opt.kappa;
  s.f = parse_polynomial("0.2 x1^3 x2^2 - 0.15 x1 y2^4 + 0.1 y1^2 x2^3 + 0.05 x1^5", amb);
  s.f_kappa = Polynomial(amb);
  s.Lambda = Polynomial(amb);
  const Polynomial zpart = parse_polynomial("0.1 x1^2 x2^2 + 0.05 y1^4", amb);
  const Polynomial x1 = Polynomial::variable(amb, amb.x(0));
  for (int k = 0; k < opt.N; ++k) {
    const Polynomial xi2 = Polynomial::variable(amb, amb.xi(k)) * Polynomial::variable(amb, amb.xi(k));
    const Polynomial eta2 = Polynomial::variable(amb, amb.eta(k)) * Polynomial::variable(amb, amb.eta(k));
    s.Lambda += (xi2 + eta2) * 0.5;
    if (opt.coupling) s.f += (xi2 + eta2) * zpart;
    if (opt.kappa_term) s.f_kappa += xi2 * x1 * 0.1;
  }
  return s;
}

RecipeInputs recipe_inputs(const SystemSpec& spec, double theta, double a, double tau) {
  RecipeInputs in;
  in.theta = theta;
  in.a = a;
  in.n = spec.n;
  in.normA = l1_operator_norm(spec.A);
  in.C0 = spec.C0;
  in.M = spec.M;
  in.C_Lambda = spec.C_Lambda;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(spec.A);
  if (!lu.isInvertible()) throw PreconditionError("recipe_inputs: A is singular");
  in.C_A = kTwoPi * linf_operator_norm(lu.inverse());
  in.tau = tau;
  return in;
}

DriftReport measure_drift(const SystemSpec& spec, const PhasePoint& init, double horizon, double dt,
                          const DriftBound& bound) {
  spec.validate();
  if (!(horizon >= 0)) throw PreconditionError("measure_drift: horizon must be >= 0");
  if (!(dt > 0)) throw PreconditionError("measure_drift: dt must be positive");
  if (!(init.ambient() == spec.ambient())) throw DimensionError("measure_drift: initial point dimension mismatch");
  require_hypotheses(spec);
  return drift_report(spec, init, horizon, dt, bound);
}

double choose_horizon(const HorizonRule& rule, double k, double theta, double a) {
  const double raw = rule.kind == HorizonRule::Kind::fixed ? rule.value : std::exp(k / std::pow(theta, a));
  return std::min(raw, rule.T_max);
}

PhasePoint scaled_initial_point(const SystemSpec& spec, double theta, const std::vector<double>& fractions,
                                double kappa_lambda_target, std::uint64_t phase_seed, std::uint64_t zeta_seed) {
  const Ambient amb = spec.ambient();
  PhasePoint pt(amb);
  auto prng = make_rng({phase_seed, 1});
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (int j = 0; j < spec.n; ++j) {
    const double r = std::sqrt(2.0 * fractions[j] * theta * theta);
    const double phi = angle(prng);
    pt.z[j] = r * std::cos(phi);
    pt.z[spec.n + j] = r * std::sin(phi);
  }
  if (spec.N == 0 || spec.kappa == 0.0 || kappa_lambda_target <= 0.0) return pt;

  auto zrng = make_rng({zeta_seed, 2});
  std::normal_distribution<double> gauss;
  std::vector<double> u(2 * spec.N);
  do {
    for (double& v : u) v = gauss(zrng);
  } while (norm2(u) == 0.0);
  const double un = norm2(u);
  for (double& v : u) v /= un;

  std::vector<double> x(amb.nvars(), 0.0);
  auto kl = [&](double s) {
    for (int i = 0; i < 2 * spec.N; ++i) x[2 * spec.n + i] = s * u[i];
    return spec.kappa * evaluate(spec.Lambda, std::span<const double>(x));
  };
  double hi = 1.0;
  for (int it = 0; it < 200 && kl(hi) < kappa_lambda_target; ++it) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (kl(mid) < kappa_lambda_target ? lo : hi) = mid;
  }
  for (int i = 0; i < 2 * spec.N; ++i) pt.zeta[i] = hi * u[i];
  return pt;
}

SmallKappaStudy smallkappa_scaling_study(const std::vector<SystemSpec>& bases, const std::vector<double>& theta_grid,
                                         double a, const HorizonRule& horizon, const StudyOptions& opt) {
  if (bases.empty() || theta_grid.empty()) throw PreconditionError("smallkappa_scaling_study: empty grid");
  if (opt.phases < 1) throw PreconditionError("smallkappa_scaling_study: phases must be >= 1");
  for (const auto& b : bases) {
    if (!(a > 0.0 && a < admissible_a_bound(b.n))) throw PreconditionError("smallkappa_scaling_study: a is not admissible");
  }
  SmallKappaStudy study;
  study.theta_grid = theta_grid;

  // One job per (base, theta, phase); the kappa of every job is fixed by theta.
  struct Job {
    std::size_t base, theta;
    SystemSpec spec;
    double horizon, K, C_E;
  };
  std::vector<Job> grid;
  for (std::size_t b = 0; b < bases.size(); ++b) {
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
      Job job{b, i, bases[b], 0, 0, 0};
      const RecipeConstants rc = parameter_recipe(recipe_inputs(bases[b], theta_grid[i], a, std::numbers::pi));
      job.spec.kappa = rc.kappa;
      job.spec.validate();
      job.horizon = choose_horizon(horizon, rc.k, theta_grid[i], a);
      job.K = rc.K;
      job.C_E = rc.C_E;
      study.K = rc.K;
      grid.push_back(std::move(job));
    }
  }
  for (const auto& job : grid) {
    if (job.theta == 0) require_hypotheses(job.spec);
  }

  const std::size_t P = opt.phases;
  std::vector<DriftReport> runs(grid.size() * P);
  parallel_for(runs.size(), opt.workers, [&](std::size_t idx) {
    const Job& job = grid[idx / P];
    const double theta = theta_grid[job.theta];
    const double dt = opt.dt > 0 ? opt.dt : default_dt(job.spec);
    const PhasePoint init = phase_initial(job.spec, theta, a, job.C_E, opt, idx % P);
    runs[idx] = drift_report(job.spec, init, job.horizon, dt, {theta, a, job.K});
    runs[idx].horizon_cap = horizon.T_max;
  });

  study.reports.assign(bases.size(), std::vector<DriftReport>(theta_grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<DriftReport> phase_runs(runs.begin() + g * P, runs.begin() + (g + 1) * P);
    study.reports[grid[g].base][grid[g].theta] = worst_case(phase_runs);
  }

  study.all_bounds_passed = true;
  study.fitted_drift_exponent = INFINITY;
  for (const auto& row : study.reports) {
    std::vector<double> lx, ly;
    for (const auto& r : row) {
      study.all_bounds_passed = study.all_bounds_passed && r.bound_passed;
      lx.push_back(std::log(r.theta));
      ly.push_back(std::log(r.max_action_drift));
    }
    const double slope = row.size() >= 2 ? fit_slope(lx, ly) : NAN;
    study.drift_slopes.push_back(slope);
    study.fitted_drift_exponent = std::min(study.fitted_drift_exponent, slope);
  }
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& row : study.reports) {
      lo = std::min(lo, row[i].max_action_drift);
      hi = std::max(hi, row[i].max_action_drift);
    }
    study.n_uniformity_ratio.push_back(lo > 0 ? hi / lo : (hi > 0 ? INFINITY : 1.0));
  }
  return study;
}

std::vector<DriftReport> variant_scaling_study(const SystemSpec& base, double theta, double a,
                                               const std::vector<double>& kappa_grid, const HorizonRule& horizon,
                                               const StudyOptions& opt) {
  base.validate();
  if (base.f.depends_on_zeta()) {
    throw PreconditionError("variant_scaling_study: f couples zeta to z; only kappa f_kappa may involve zeta");
  }
  for (const auto& [e, c] : base.f_kappa.terms()) {
    int dz = 0, dzeta = 0;
    const Ambient amb = base.ambient();
    for (int v = 0; v < amb.nvars(); ++v) (amb.is_z(v) ? dz : dzeta) += e[v];
    if (dz < 1 || dzeta < 2) {
      throw PreconditionError("variant_scaling_study: f_kappa term is not of the |zeta|^2 |z| type");
    }
  }
  if (!(a > 0.0 && a < admissible_a_bound(base.n))) throw PreconditionError("variant_scaling_study: a is not admissible");
  const RecipeConstants rc = parameter_recipe(recipe_inputs(base, theta, a, std::numbers::pi));
  for (double k : kappa_grid) {
    if (!(k > 0.0 && k <= rc.kappa * (1 + 1e-12))) {
      throw PreconditionError("variant_scaling_study: kappa must lie in (0, theta^{2+2a(2n-1)}]");
    }
  }
  SystemSpec probe = base;
  probe.kappa = kappa_grid.empty() ? 0.0 : kappa_grid.front();
  require_hypotheses(probe);

  const double T = choose_horizon(horizon, rc.k, theta, a);
  std::vector<DriftReport> out;
  for (double k : kappa_grid) {
    SystemSpec spec = base;
    spec.kappa = k;
    out.push_back(worst_case(run_phases(spec, theta, a, T, horizon.T_max, rc.K, rc.C_E, opt)));
  }
  return out;
}

ConvergenceReport constrained_limit_study(const SystemSpec& spec_template, const PhasePoint& init_template,
                                          const std::vector<double>& kappa_grid, double horizon, double dt,
                                          int workers) {
  spec_template.validate();
  if (!(init_template.ambient() == spec_template.ambient())) {
    throw DimensionError("constrained_limit_study: initial point dimension mismatch");
  }
  if (!(horizon > 0)) throw PreconditionError("constrained_limit_study: horizon must be positive");
  ConvergenceReport rep;
  rep.kappa_grid = kappa_grid;

  // Hypotheses of the limit statement that can be checked on the data.
  {
    HypothesisItem grid{"kappa_grid_increasing", true, true, "", {}};
    for (std::size_t i = 0; i < kappa_grid.size(); ++i) {
      if (!(kappa_grid[i] > 0) || (i > 0 && !(kappa_grid[i] > kappa_grid[i - 1]))) {
        grid.passed = false;
        grid.detail = "kappa grid must be positive and strictly increasing";
      }
    }
    rep.hypotheses.items.push_back(grid);
    HypothesisItem quad{"lambda_quadratic", true, true, "", {}};
    for (const auto& [e, c] : spec_template.Lambda.terms()) {
      int d = 0;
      for (auto v : e) d += v;
      if (d != 2) {
        quad.passed = false;
        quad.detail = "Lambda must be a quadratic form for the 1/sqrt(kappa) scaling";
      }
    }
    rep.hypotheses.items.push_back(quad);
    SystemSpec probe = spec_template;
    probe.kappa = kappa_grid.empty() ? 1.0 : kappa_grid.front();
    const HypothesisReport hyp = check_structural_hypotheses(probe);
    if (const auto* low = hyp.find("lambda_lower")) rep.hypotheses.items.push_back(*low);
  }

  const std::size_t K = kappa_grid.size();
  rep.dt.resize(K);
  rep.sup_distance.resize(K);
  rep.sup_kappa_Lambda.resize(K);
  rep.max_zeta.resize(K);
  rep.max_relative_energy_error.resize(K);
  const Ambient amb = spec_template.ambient();
  const int nz = 2 * amb.n;

  parallel_for(K, workers, [&](std::size_t i) {
    SystemSpec spec = spec_template;
    spec.kappa = kappa_grid[i];
    const double h = dt > 0 ? dt : default_dt(spec);
    rep.dt[i] = h;
    PhasePoint init = init_template;
    for (double& v : init.zeta) v /= std::sqrt(kappa_grid[i]);

    const Polynomial H = total_hamiltonian(spec);
    const Polynomial H0 = H.restricted_to_zeta_zero();
    HamiltonianFlow full(H), reduced(H0);
    PhasePoint ref0 = init;
    std::fill(ref0.zeta.begin(), ref0.zeta.end(), 0.0);
    const Polynomial polys[] = {H, spec.Lambda};
    CompiledPolynomials obs(polys, amb.nvars());
    double vals[2];
    obs.evaluate(init.flat(), vals);
    const double E0 = vals[0], Escale = std::max(std::abs(E0), 1e-300);

    double dist = 0.0, kl = 0.0, zmax = 0.0, energy = 0.0;
    for (double sign : {1.0, -1.0}) {
      // Both orbits use the same grid, so they can be advanced in lockstep.
      std::vector<double> x = init.flat(), r = ref0.flat();
      const long steps = std::max(1L, static_cast<long>(std::ceil(horizon / h - 1e-9)));
      const double step = sign * horizon / static_cast<double>(steps);
      for (long s = 0; s <= steps; ++s) {
        if (s > 0) {
          full.step(x, step);
          reduced.step(r, step);
        }
        double dz = 0.0, zeta = 0.0;
        for (int v = 0; v < nz; ++v) dz += (x[v] - r[v]) * (x[v] - r[v]);
        for (int v = nz; v < amb.nvars(); ++v) zeta += x[v] * x[v];
        dz = std::sqrt(dz);
        zeta = std::sqrt(zeta);
        dist = std::max(dist, dz + zeta);
        zmax = std::max(zmax, zeta);
        obs.evaluate(x, vals);
        kl = std::max(kl, spec.kappa * vals[1]);
        energy = std::max(energy, std::abs(vals[0] - E0) / Escale);
      }
    }
    rep.sup_distance[i] = dist;
    rep.sup_kappa_Lambda[i] = kl;
    rep.max_zeta[i] = zmax;
    rep.max_relative_energy_error[i] = energy;
  });

  auto monotone = [](const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] > 1.05 * v[i - 1]) return false;
    return true;
  };
  rep.distance_monotone = monotone(rep.sup_distance);
  rep.kappa_lambda_monotone = monotone(rep.sup_kappa_Lambda);
  bool has_zeta = K >= 2;
  for (double z : rep.max_zeta) has_zeta = has_zeta && z > 0;
  if (has_zeta) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < K; ++i) {
      lx.push_back(std::log(kappa_grid[i]));
      ly.push_back(std::log(rep.max_zeta[i]));
    }
    rep.fitted_zeta_slope = fit_slope(lx, ly);
  } else {
    rep.fitted_zeta_slope = NAN;
  }
  return rep;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job) {
  if (count == 0) return;
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers) : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("fit_slope: need at least two paired values");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_drift_csv(std::ostream& os, const std::vector<DriftReport>& reports) {
  os << "theta,a,kappa,N,horizon,horizon_cap,dt,max_action_drift,max_kappa_Lambda,bound_K_theta,"
        "bound_kappa_Lambda,bound_passed,max_relative_energy_error,phases\n";
  for (const auto& r : reports) {
    for (double v : {r.theta, r.a, r.kappa}) {
      put(os, v);
      os << ',';
    }
    os << r.N << ',';
    for (double v : {r.horizon, r.horizon_cap, r.dt, r.max_action_drift, r.max_kappa_Lambda, r.bound_K_theta,
                     r.bound_kappa_Lambda}) {
      put(os, v);
      os << ',';
    }
    os << (r.bound_passed ? "true" : "false") << ',';
    put(os, r.max_relative_energy_error);
    os << ',' << r.phases << '\n';
  }
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep) {
  os << "kappa,dt,sup_distance,sup_kappa_Lambda,max_zeta,max_relative_energy_error\n";
  for (std::size_t i = 0; i < rep.kappa_grid.size(); ++i) {
    for (double v : {rep.kappa_grid[i], rep.dt[i], rep.sup_distance[i], rep.sup_kappa_Lambda[i], rep.max_zeta[i]}) {
      put(os, v);
      os << ',';
    }
    put(os, rep.max_relative_energy_error[i]);
    os << '\n';
  }
}

}  // namespace neklab
