// Acceptance checks. Without arguments every criterion runs; with --criterion K only K runs.
// Prints one PASS/FAIL line per criterion and exits non-zero if any selected one fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "neklab/conditions.hpp"
#include "neklab/diophantine.hpp"
#include "neklab/experiments.hpp"
#include "neklab/integrator.hpp"
#include "neklab/normal_form.hpp"
#include "support.hpp"

using namespace neklab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome dirichlet_bound() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_int_distribution<int> Qd(2, 50), nd(2, 3);
  int bound_fail = 0, oracle_fail = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = nd(rng);
    std::vector<double> w(n);
    for (double& v : w) v = u(rng);
    const int Q = Qd(rng);
    const auto r = dirichlet_best(w, Q);
    const auto o = testing::brute_force_dirichlet(w, Q);
    if (!(r.err <= std::pow(Q, -1.0 / n))) ++bound_fail;
    if (r.q != o.q || r.p != o.p || r.err != o.err) ++oracle_fail;
  }
  return {bound_fail == 0 && oracle_fail == 0,
          fmt("100 cases, %d bound failures, %d oracle mismatches", bound_fail, oracle_fail)};
}

Outcome periodicity() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> mag(1.0001, 10.0), u(-1, 1), u01(0, 1);
  std::uniform_int_distribution<int> Qd(1, 60), nd(2, 4);
  double worst_lattice = 0.0;
  int fails = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = nd(rng);
    std::vector<double> w(n);
    for (double& v : w) v = u(rng);
    const double m = mag(rng);
    for (double& v : w) v *= m;
    w[std::uniform_int_distribution<int>(0, n - 1)(rng)] = (u(rng) < 0 ? -1 : 1) * m;
    const int Q = Qd(rng);
    const auto pf = periodic_frequency(w, Q);
    double dev = 0.0;
    for (int j = 0; j < n; ++j) {
      worst_lattice = std::max(worst_lattice, testing::dist_to_2pi_lattice(pf.T * pf.omega0[j]));
      dev = std::max(dev, std::abs(w[j] - pf.omega0[j]));
    }
    if (!(dev <= kTwoPi / (pf.T * std::pow(Q, 1.0 / (n - 1))) * (1 + 1e-12))) ++fails;
    if (!(pf.T >= kTwoPi * (1 - 1 / m) * (1 - 1e-12) && pf.T <= kTwoPi * Q * (1 + 1e-12))) ++fails;
  }
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 2;
    const double a = 0.5 * (n == 2 ? 1.0 / 7.0 : 1.0 / 10.0);
    std::vector<double> alpha(n);
    for (double& v : alpha) v = 1.0 + 2.0 * u01(rng);
    Eigen::MatrixXd B(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) B(r, c) = u(rng);
    const Eigen::MatrixXd A = B * B.transpose() + Eigen::MatrixXd::Identity(n, n);
    const double theta = periodic_orbit_threshold(alpha, A, a) * (0.05 + 0.9 * u01(rng));
    std::vector<double> I(n);
    double s = 0.0;
    for (double& v : I) s += (v = u01(rng) + 0.01);
    for (double& v : I) v *= theta * theta / s;
    const auto pa = approximate_periodic_orbit(alpha, A, I, a);
    double dev = 0.0;
    for (int j = 0; j < n; ++j) dev = std::max(dev, std::abs(I[j] - pa.I0[j]));
    const double C = kTwoPi * linf_operator_norm(A.inverse());
    if (!(dev <= C * std::pow(theta, 2 + a) / pa.tau * (1 + 1e-9))) ++fails;
    if (!(pa.tau <= 4 * kPi * std::pow(theta, -a * (n - 1)))) ++fails;
    for (double w : pa.omega0) worst_lattice = std::max(worst_lattice, testing::dist_to_2pi_lattice(pa.T * w));
  }
  return {fails == 0 && worst_lattice <= 1e-9,
          fmt("200 cases, %d bound failures, worst lattice distance %.3g", fails, worst_lattice)};
}

Outcome averaging_exactness() {
  std::mt19937_64 rng(1003);
  const Ambient amb{2, 1};
  const std::vector<std::pair<std::vector<double>, double>> freqs{
      {{1.0, 2.0}, kTwoPi}, {{1.4, 2.0}, 10 * kPi}, {{0.5, 1.5}, 4 * kPi}, {{1.0, 1.0}, kTwoPi}};
  int inexact = 0;
  double worst_quad = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto& [omega0, T] = freqs[i % freqs.size()];
    const auto f = testing::random_real_polynomial(rng, amb, 6, 15);
    const auto h = frequency_hamiltonian(amb, omega0);
    const auto fbar = resonant_average(f, omega0, T);
    const auto phi = homological_generator(f, omega0, T);
    if (!poisson_bracket(fbar, h).is_zero()) ++inexact;
    if (!(poisson_bracket(phi, h) - (f - fbar)).is_zero()) ++inexact;
    const int nodes = quadrature_average(f, omega0, T, 1).required_nodes;
    const auto q = quadrature_average(f, omega0, T, nodes);
    for (const auto& [e, c] : q.average.terms()) worst_quad = std::max(worst_quad, std::abs(c - fbar.coefficient(e)));
    for (const auto& [e, c] : fbar.terms()) worst_quad = std::max(worst_quad, std::abs(c - q.average.coefficient(e)));
  }
  return {inexact == 0 && worst_quad <= 1e-10,
          fmt("100 polynomials, %d inexact identities, quadrature max difference %.3g", inexact, worst_quad)};
}

Outcome one_step_decomposition() {
  const Ambient a10{1, 0};
  AveragingContext c1;
  c1.ambient = a10;
  c1.omega0 = {1.0};
  c1.T = kTwoPi;
  c1.I0 = {0.0};
  c1.A = Eigen::MatrixXd::Zero(1, 1);
  const auto r1 = one_step(c1, Polynomial(a10), Polynomial::variable(a10, 0), Polynomial(a10));
  const bool closed = r1.phi == -Polynomial::variable(a10, 1) && r1.f_plus == Polynomial::constant(a10, -0.5);

  // Desk system with the periodic approximation of its frequencies.
  const SystemSpec s = desk_system({1, true, true, 0.01});
  const auto pf = periodic_frequency(s.alpha, 5);
  AveragingContext ctx;
  ctx.ambient = s.ambient();
  ctx.omega0 = pf.omega0;
  ctx.T = pf.T;
  ctx.I0 = s.I0;
  ctx.A = s.A;
  ctx.kappa = s.kappa;
  ctx.r = {0.05 * 0.05 / 2, 0.05, 0.05};
  ctx.rho = {ctx.r[0] / 3, ctx.r[1] / 3, ctx.r[2] / 3};
  const auto r = one_step(ctx, Polynomial(ctx.ambient), s.perturbation(), s.Lambda);
  const auto& rep = r.report;
  return {closed && rep.smallness_passed && rep.f_plus_norm <= rep.f_plus_bound,
          fmt("closed form %s; desk T=%.4g smallness %.3g < %.3g, |f+| = %.4g <= bound %.4g", closed ? "exact" : "WRONG",
              pf.T, rep.smallness_lhs, rep.smallness_rhs, rep.f_plus_norm, rep.f_plus_bound)};
}

Outcome iteration_halving() {
  const double theta = 0.2, a = 0.125;
  SystemSpec s = desk_system({1});
  const auto pa = approximate_periodic_orbit(s.alpha, s.A, {theta * theta / 2, theta * theta / 2}, a);
  const auto rc = parameter_recipe(recipe_inputs(s, theta, a, pa.tau));
  s.kappa = rc.kappa;
  AveragingContext ctx;
  ctx.ambient = s.ambient();
  ctx.omega0 = pa.omega0;
  ctx.T = pa.T;
  ctx.I0 = pa.I0;
  ctx.A = s.A;
  ctx.kappa = rc.kappa;
  ctx.C_Lambda = s.C_Lambda;
  ctx.r = {rc.r1, rc.r2, rc.r3};
  ctx.m = rc.m;
  const auto nf = iterate_normal_form(ctx, s.perturbation(), s.Lambda);
  bool halved = true;
  std::ostringstream norms;
  for (std::size_t j = 0; j < nf.norms.size(); ++j) {
    if (j > 0 && !(nf.norms[j] <= 0.5 * nf.norms[j - 1])) halved = false;
    norms << (j ? " -> " : "") << fmt("%.4g", nf.norms[j]);
  }
  const bool final_ok = nf.norms.back() <= nf.final_bound;
  return {halved && final_ok, fmt("m=%d, norms %s, final bound 2^-m eps = %.4g, recipe conditions %s", rc.m,
                                  norms.str().c_str(), nf.final_bound, nf.conditions.passed() ? "hold" : "violated")};
}

Outcome integrator_quality() {
  SystemSpec s = desk_system({1});
  const double theta = 0.2, a = 0.125;
  const auto rc = parameter_recipe(recipe_inputs(s, theta, a, kPi));
  s.kappa = rc.kappa;
  const Polynomial H = total_hamiltonian(s);
  HamiltonianFlow flow(H);
  const Ambient amb = s.ambient();
  const int d = amb.nvars();

  // Symplecticity of one step by central differences.
  const std::vector<double> x{0.3, -0.2, 0.25, 0.1, 0.2, -0.15};
  Eigen::MatrixXd J(d, d), S = Eigen::MatrixXd::Zero(d, d);
  const double hstep = 1e-6, dt0 = default_dt(s);
  for (int c = 0; c < d; ++c) {
    auto p = x, m = x;
    p[c] += hstep;
    m[c] -= hstep;
    flow.step(p, dt0);
    flow.step(m, dt0);
    for (int r = 0; r < d; ++r) J(r, c) = (p[r] - m[r]) / (2 * hstep);
  }
  for (int j = 0; j < amb.n; ++j) {
    S(amb.x(j), amb.y(j)) = 1;
    S(amb.y(j), amb.x(j)) = -1;
  }
  for (int k = 0; k < amb.N; ++k) {
    S(amb.xi(k), amb.eta(k)) = 1;
    S(amb.eta(k), amb.xi(k)) = -1;
  }
  const double defect = (J.transpose() * S * J - S).cwiseAbs().maxCoeff();

  // Order on the integrable part against the exact rotation.
  SystemSpec lin = s;
  lin.A = Eigen::MatrixXd::Zero(2, 2);
  lin.f = Polynomial(amb);
  lin.f_kappa = Polynomial(amb);
  lin.Lambda = Polynomial(amb);
  lin.kappa = 0;
  const PhasePoint p0({0.6, 0.0, 0.0, 0.8}, {0.0, 0.0});
  const auto exact = exact_flow_h(p0, s.alpha, kTwoPi).flat();
  std::vector<double> lx, ly;
  HamiltonianFlow lin_flow(total_hamiltonian(lin));
  for (int e = 6; e <= 12; ++e) {
    const double dt = std::ldexp(kTwoPi, -e);
    const auto y = propagate(lin_flow, p0.flat(), kTwoPi, dt, nullptr);
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) err = std::max(err, std::abs(y[i] - exact[i]));
    lx.push_back(std::log(dt));
    ly.push_back(std::log(err));
  }
  const double slope = fit_slope(lx, ly);

  // Energy over 10^6 steps from a point at the small-kappa scale.
  const PhasePoint start =
      scaled_initial_point(s, theta, {0.5, 0.5}, 0.5 * rc.C_E * std::pow(theta, 4 + 2 * a * s.n), 5, 6);
  const double E0 = evaluate(H, start);
  auto energy_error = [&](double dt) {
    double worst = 0.0;
    propagate(flow, start.flat(), 1e6 * dt, dt, [&](double, const std::vector<double>& y) {
      worst = std::max(worst, std::abs(evaluate(H, std::span<const double>(y)) - E0) / std::abs(E0));
    });
    return worst;
  };
  const double fine = energy_error(dt0 / 32);
  const double coarse = energy_error(dt0);
  return {defect <= 1e-6 && std::abs(slope - 2.0) <= 0.1 && fine <= 1e-8,
          fmt("symplectic defect %.3g, order slope %.4f, relative energy error over 1e6 steps %.3g at dt/32 "
              "(%.3g at the default dt)",
              defect, slope, fine, coarse)};
}

Outcome constrained_limit() {
  const SystemSpec s = desk_system({1, true, false});
  const PhasePoint init({0.3, 0.1, -0.2, 0.25}, {0.5, 0.3});
  const auto rep = constrained_limit_study(s, init, {10, 100, 1000, 10000}, 10.0, 0.0, 0);
  std::ostringstream d;
  for (std::size_t i = 0; i < rep.sup_distance.size(); ++i) d << (i ? ", " : "") << fmt("%.4g", rep.sup_distance[i]);
  return {rep.hypotheses.passed() && rep.distance_monotone && std::abs(rep.fitted_zeta_slope + 0.5) <= 0.1,
          fmt("sup distance %s, zeta slope %.4f", d.str().c_str(), rep.fitted_zeta_slope)};
}

Outcome smallkappa_scaling() {
  std::vector<SystemSpec> bases;
  for (int N : {1, 4, 16}) bases.push_back(desk_system({N}));
  StudyOptions opt;
  opt.phases = 8;
  const auto st =
      smallkappa_scaling_study(bases, {0.3, 0.2, 0.15, 0.1}, 0.125, {HorizonRule::Kind::fixed, 1e4, 1e5}, opt);
  double ratio = 0.0, margin = 0.0, energy = 0.0;
  for (double r : st.n_uniformity_ratio) ratio = std::max(ratio, r);
  for (const auto& row : st.reports) {
    for (const auto& r : row) {
      margin = std::max(margin, r.max_action_drift / r.bound_K_theta);
      margin = std::max(margin, r.max_kappa_Lambda / r.bound_kappa_Lambda);
      energy = std::max(energy, r.max_relative_energy_error);
    }
  }
  return {st.all_bounds_passed && st.fitted_drift_exponent >= 2.0 && ratio < 2.0,
          fmt("K=%.4g, worst drift/bound %.3g, drift exponent %.3f, worst N ratio %.3f, energy error %.3g", st.K,
              margin, st.fitted_drift_exponent, ratio, energy)};
}

Outcome recipe_constants() {
  RecipeInputs in;
  in.theta = 0.2;
  in.a = 0.125;
  in.n = 2;
  in.normA = 1;
  in.C0 = 1;
  in.M = 1;
  in.C_Lambda = 1;
  in.C_A = 1;
  in.tau = kPi;
  const auto rc = parameter_recipe(in);
  auto rel = [](double v, double want) { return std::abs(v - want) / std::abs(want); };
  const double worst = std::max({rel(rc.L, 40), rel(rc.P, 6.3662), rel(rc.K, 25.465), rel(rc.C_E, 0.05066)});
  return {worst <= 1e-4, fmt("L=%.6g P=%.6g K=%.6g C_E=%.6g, worst relative deviation %.2g", rc.L, rc.P, rc.K, rc.C_E,
                             worst)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {1, "dirichlet bound", 5, dirichlet_bound},
      {2, "periodicity", 5, periodicity},
      {3, "averaging exactness", 30, averaging_exactness},
      {4, "one-step decomposition", 10, one_step_decomposition},
      {5, "iteration halving", 60, iteration_halving},
      {6, "integrator quality", 300, integrator_quality},
      {7, "constrained limit", 300, constrained_limit},
      {8, "small-kappa scaling", 1800, smallkappa_scaling},
      {9, "recipe constants", 1, recipe_constants},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %d %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                c.limit_seconds, in_time ? "" : " OVER TIME");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
