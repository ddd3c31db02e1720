#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "neklab/integrator.hpp"
#include "neklab/normal_form.hpp"
#include "support.hpp"

using namespace neklab;
using testing::ex;

namespace {

constexpr double kPi = std::numbers::pi;
const Ambient A10{1, 0};
const Ambient A20{2, 0};
const Ambient A21{2, 1};

// Time average of f along the rotation flow, by direct evaluation on a fine grid.
double flow_average_at(const Polynomial& f, const std::vector<double>& omega0, double T, const PhasePoint& pt,
                       int samples = 512) {
  double s = 0.0;
  for (int k = 0; k < samples; ++k) s += evaluate(f, exact_flow_h(pt, omega0, T * k / samples));
  return s / samples;
}

Polynomial quintic(Ambient amb) {
  return parse_polynomial("0.2 x1^3 x2^2 - 0.15 x1 y2^4 + 0.1 y1^2 x2^3 + 0.05 x1^5", amb);
}

}  // namespace

TEST_CASE("exact flow of h") {
  PhasePoint p({1.0, 0.0}, {});
  CHECK(exact_flow_h(p, {1.0}, 0.0) == p);
  auto q = exact_flow_h(p, {1.0}, kPi / 2);
  CHECK(q.z[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(q.z[1] == doctest::Approx(-1.0));
  std::mt19937_64 rng(31);
  auto pt = testing::random_point(rng, A21);
  auto r = exact_flow_h(pt, {1.0, 2.0}, 2 * kPi);
  for (std::size_t i = 0; i < pt.z.size(); ++i) CHECK(std::abs(r.z[i] - pt.z[i]) <= 1e-12);
  CHECK(r.zeta == pt.zeta);
  auto s = exact_flow_h(pt, {1.0, 2.0}, 0.7);
  CHECK(actions(s)[0] == doctest::Approx(actions(pt)[0]).epsilon(1e-14));
  CHECK(s.norm_z() == doctest::Approx(pt.norm_z()).epsilon(1e-14));
}

TEST_CASE("flow of h matches the bracket convention") {
  // d/dt F(X_h^t) = {F, h}; check with F = x1 at t = 0.
  const auto h = frequency_hamiltonian(A10, {1.0});
  PhasePoint p({0.3, 0.4}, {});
  const double dt = 1e-6;
  const double fd = (exact_flow_h(p, {1.0}, dt).z[0] - exact_flow_h(p, {1.0}, -dt).z[0]) / (2 * dt);
  CHECK(fd == doctest::Approx(evaluate(poisson_bracket(Polynomial::variable(A10, 0), h), p)).epsilon(1e-8));
}

TEST_CASE("resonant average examples") {
  const auto I1 = Polynomial::action(A10, 0);
  CHECK(resonant_average(I1, {1.0}, 2 * kPi) == I1);
  CHECK(resonant_average(Polynomial::variable(A10, 0), {1.0}, 2 * kPi).is_zero());
  auto x2 = Polynomial::monomial(A10, ex(A10, {{0, 2}}), 1.0);
  CHECK(resonant_average(x2, {1.0}, 2 * kPi) == I1);
  // x1 y2 with equal frequencies keeps (x1 y2 - x2 y1) / 2.
  auto f = parse_polynomial("x1 y2", A20);
  CHECK(resonant_average(f, {1.0, 1.0}, 2 * kPi) == parse_polynomial("0.5 x1 y2 - 0.5 x2 y1", A20));
  CHECK_THROWS_AS(resonant_average(f, {1.0, std::sqrt(2.0)}, 2 * kPi), PreconditionError);
}

TEST_CASE("resonant average matches the time average of the flow") {
  std::mt19937_64 rng(32);
  const std::vector<double> omega0{1.0, 2.0};
  for (int i = 0; i < 20; ++i) {
    auto f = testing::random_real_polynomial(rng, A21, 6, 10);
    auto fbar = resonant_average(f, omega0, 2 * kPi);
    auto pt = testing::random_point(rng, A21);
    CHECK(evaluate(fbar, pt) == doctest::Approx(flow_average_at(f, omega0, 2 * kPi, pt)).epsilon(1e-10).scale(1.0));
    CHECK(majorant_norm(fbar, 0.7, 0.4) <= majorant_norm(f, 0.7, 0.4) * (1 + 1e-12));
  }
}

TEST_CASE("averaging identities are coefficient-exact") {
  std::mt19937_64 rng(33);
  const std::vector<std::pair<std::vector<double>, double>> cases{
      {{1.0, 2.0}, 2 * kPi}, {{1.4, 2.0}, 10 * kPi}, {{0.5, 1.5}, 4 * kPi}};
  for (int i = 0; i < 100; ++i) {
    const auto& [omega0, T] = cases[i % cases.size()];
    auto f = testing::random_real_polynomial(rng, A21, 6, 12);
    const auto h = frequency_hamiltonian(A21, omega0);
    auto fbar = resonant_average(f, omega0, T);
    auto phi = homological_generator(f, omega0, T);
    CHECK(poisson_bracket(fbar, h).is_zero());
    CHECK((poisson_bracket(phi, h) - (f - fbar)).is_zero());
    CHECK(majorant_norm(phi, 0.9, 0.6) <= T * majorant_norm(f, 0.9, 0.6));
    if (i < 10) CHECK(homological_generator(fbar, omega0, T).is_zero());
  }
}

TEST_CASE("homological generator examples") {
  CHECK(homological_generator(Polynomial::variable(A10, 0), {1.0}, 2 * kPi) == -Polynomial::variable(A10, 1));
  CHECK(homological_generator(Polynomial::variable(A10, 1), {1.0}, 2 * kPi) == Polynomial::variable(A10, 0));
  CHECK(homological_generator(Polynomial::action(A10, 0), {1.0}, 2 * kPi).is_zero());
}

TEST_CASE("homological generator matches the t-weighted integral") {
  std::mt19937_64 rng(34);
  const std::vector<double> omega0{1.0, 2.0};
  const double T = 2 * kPi;
  for (int i = 0; i < 10; ++i) {
    auto f = testing::random_real_polynomial(rng, A21, 4, 6);
    auto g = f - resonant_average(f, omega0, T);
    auto phi = homological_generator(f, omega0, T);
    auto pt = testing::random_point(rng, A21);
    // (1/T) int_0^T t g(X_h^t) dt by the composite Simpson rule.
    const int K = 2000;
    double s = 0.0;
    for (int k = 0; k <= K; ++k) {
      const double t = T * k / K;
      const double w = (k == 0 || k == K) ? 1 : (k % 2 ? 4 : 2);
      s += w * t * evaluate(g, exact_flow_h(pt, omega0, t));
    }
    s *= (T / K) / 3 / T;
    CHECK(evaluate(phi, pt) == doctest::Approx(s).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("quadrature average") {
  const auto I1 = Polynomial::action(A10, 0);
  auto q = quadrature_average(I1, {1.0}, 2 * kPi, 5);
  CHECK(q.nodes_sufficient);
  CHECK(q.average.size() == I1.size());
  for (const auto& [e, c] : I1.terms()) CHECK(q.average.coefficient(e) == doctest::Approx(c).epsilon(1e-12));
  auto x2 = Polynomial::monomial(A10, ex(A10, {{0, 2}}), 1.0);
  q = quadrature_average(x2, {1.0}, 2 * kPi, 5);
  CHECK(q.required_nodes == 5);
  for (const auto& [e, c] : I1.terms()) CHECK(q.average.coefficient(e) == doctest::Approx(c).epsilon(1e-10));
  q = quadrature_average(parse_polynomial("x1 y2", A20), {1.0, 1.0}, 2 * kPi, 5);
  CHECK(q.average.coefficient(ex(A20, {{0, 1}, {3, 1}})) == doctest::Approx(0.5));
  CHECK(q.average.coefficient(ex(A20, {{1, 1}, {2, 1}})) == doctest::Approx(-0.5));
  CHECK(q.average.size() == 2u);
  q = quadrature_average(x2, {1.0}, 2 * kPi, 2);
  CHECK_FALSE(q.nodes_sufficient);
  CHECK_FALSE(q.warning.empty());
}

TEST_CASE("quadrature agrees with the exact average") {
  std::mt19937_64 rng(35);
  for (int i = 0; i < 30; ++i) {
    auto f = testing::random_real_polynomial(rng, A21, 6, 10);
    auto exact = resonant_average(f, {1.4, 2.0}, 10 * kPi);
    const int nodes = quadrature_average(f, {1.4, 2.0}, 10 * kPi, 1).required_nodes;
    auto q = quadrature_average(f, {1.4, 2.0}, 10 * kPi, nodes);
    REQUIRE(q.nodes_sufficient);
    for (const auto& [e, c] : exact.terms()) CHECK(q.average.coefficient(e) == doctest::Approx(c).epsilon(1e-10).scale(1.0));
    for (const auto& [e, c] : q.average.terms()) CHECK(std::abs(c - exact.coefficient(e)) <= 1e-10);
  }
}

TEST_CASE("lie transform examples") {
  const auto I1 = Polynomial::action(A10, 0);
  const auto x1 = Polynomial::variable(A10, 0);
  const auto y1 = Polynomial::variable(A10, 1);
  CHECK(lie_transform(I1, -y1, 3) == I1 - x1 + Polynomial::constant(A10, 0.5));
  CHECK(lie_transform(x1, -y1, 3) == x1 - Polynomial::constant(A10, 1.0));
  CHECK(lie_transform(I1, Polynomial(A10), 4) == I1);
  CHECK_THROWS_AS(lie_transform(I1, -y1, 1), PreconditionError);
}

TEST_CASE("lie transform is the time-one map up to truncation") {
  std::mt19937_64 rng(36);
  const int D = 4;
  auto phi = testing::random_real_polynomial(rng, A21, 3, 8, 3);
  auto F = testing::random_real_polynomial(rng, A21, 2, 6, 2);
  auto LF = lie_transform(F, phi, D);
  auto pt = testing::random_point(rng, A21);
  std::vector<double> ls, le;
  for (double s : {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}) {
    PhasePoint sp = pt;
    for (double& v : sp.z) v *= s;
    for (double& v : sp.zeta) v *= s;
    const double numeric = evaluate(F, time_one_map(phi, sp, 4096));
    ls.push_back(std::log(s));
    le.push_back(std::log(std::abs(numeric - evaluate(LF, sp))));
  }
  // Least-squares slope.
  const double n = static_cast<double>(ls.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    sx += ls[i];
    sy += le[i];
    sxx += ls[i] * ls[i];
    sxy += ls[i] * le[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope >= D + 0.5);
}

TEST_CASE("one step: translation closed form") {
  AveragingContext ctx;
  ctx.ambient = A10;
  ctx.omega0 = {1.0};
  ctx.T = 2 * kPi;
  ctx.I0 = {0.0};
  ctx.A = Eigen::MatrixXd::Zero(1, 1);
  auto res = one_step(ctx, Polynomial(A10), Polynomial::variable(A10, 0), Polynomial(A10));
  CHECK(res.phi == -Polynomial::variable(A10, 1));
  CHECK(res.g_plus.is_zero());
  CHECK(res.f_plus == Polynomial::constant(A10, -0.5));

  auto zero = one_step(ctx, Polynomial(A10), Polynomial(A10), Polynomial(A10));
  CHECK(zero.phi.is_zero());
  CHECK(zero.g_plus.is_zero());
  CHECK(zero.f_plus.is_zero());

  // g must commute with h.
  CHECK_THROWS_AS(one_step(ctx, Polynomial::variable(A10, 0), Polynomial(A10), Polynomial(A10)), PreconditionError);
}

TEST_CASE("one step on a quintic system") {
  AveragingContext ctx;
  ctx.ambient = A21;
  ctx.omega0 = {1.0, 2.0};
  ctx.T = 2 * kPi;
  ctx.I0 = {0.0, 0.0};
  ctx.A = Eigen::MatrixXd::Identity(2, 2);
  ctx.kappa = 0.01;
  ctx.r = {0.05 * 0.05 / 2, 0.05, 0.05};
  ctx.rho = {ctx.r[0] / 3, ctx.r[1] / 3, ctx.r[2] / 3};
  auto f = quintic(A21) + parse_polynomial("0.1 xi1^2 x1^2 x2^2 + 0.1 eta1^2 x1^2 x2^2 + 0.001 xi1^2 x1", A21);
  auto Lambda = parse_polynomial("0.5 xi1^2 + 0.5 eta1^2", A21);
  auto res = one_step(ctx, Polynomial(A21), f, Lambda);
  const auto h = frequency_hamiltonian(A21, ctx.omega0);
  CHECK(poisson_bracket(res.g_plus, h).is_zero());
  CHECK(res.report.smallness_passed);
  CHECK(res.report.f_plus_norm <= res.report.f_plus_bound);
  CHECK(res.report.f_plus_norm > 0.0);

  // h + g0 + g+ + kappa Lambda + f+ reproduces the transformed Hamiltonian up to the cap.
  const auto g0 = twist_hamiltonian(A21, ctx.A, ctx.I0);
  const auto H = h + g0 + f + Lambda * ctx.kappa;
  const auto assembled = h + g0 + res.g_plus + Lambda * ctx.kappa + res.f_plus;
  CHECK((lie_transform(H, res.phi, res.report.degree_cap) - assembled).is_zero());

  // And numerically H(Phi(p)) agrees with the assembly at small amplitude.
  std::mt19937_64 rng(37);
  auto pt = testing::random_point(rng, A21, 0.02);
  const double direct = evaluate(H, time_one_map(res.phi, pt, 256));
  CHECK(direct == doctest::Approx(evaluate(assembled, pt)).epsilon(1e-9).scale(1e-12));
}

TEST_CASE("iteration basics") {
  AveragingContext ctx;
  ctx.ambient = A20;
  ctx.omega0 = {1.0, 2.0};
  ctx.T = 2 * kPi;
  ctx.I0 = {0.0, 0.0};
  ctx.A = Eigen::MatrixXd::Identity(2, 2);
  ctx.r = {0.001, 0.05, 0.05};
  ctx.m = 1;
  auto nf0 = iterate_normal_form(ctx, Polynomial(A20), Polynomial(A20));
  CHECK(nf0.g_hat.is_zero());
  CHECK(nf0.f_hat.is_zero());
  for (const auto& g : nf0.generators) CHECK(g.is_zero());

  const auto f = quintic(A20);
  auto nf = iterate_normal_form(ctx, f, Polynomial(A20));
  AveragingContext step = ctx;
  step.r = {3 * ctx.r[0], 3 * ctx.r[1], 3 * ctx.r[2]};
  step.rho = ctx.r;
  step.degree_cap = nf.degree_cap;
  auto one = one_step(step, Polynomial(A20), f, Polynomial(A20));
  REQUIRE(nf.generators.size() == 1u);
  CHECK(nf.generators[0] == one.phi);
  CHECK(nf.f_hat == one.f_plus);
  CHECK(nf.g_hat == one.g_plus);

  ctx.m = 3;
  auto nf3 = iterate_normal_form(ctx, f, Polynomial(A20));
  CHECK(nf3.generators.size() == 3u);
  CHECK(nf3.norms.size() == 4u);
  CHECK(nf3.norms[0] == nf3.epsilon);
  CHECK(poisson_bracket(nf3.g_hat, frequency_hamiltonian(A20, ctx.omega0)).is_zero());
  CHECK(nf3.final_bound == doctest::Approx(nf3.epsilon / 8));
  CHECK(nf3.conditions.find("r1 < 2 r2^2") != nullptr);
  CHECK(nf3.psi_displacement_bound == doctest::Approx(18.0 * 3 * ctx.r[1] * nf3.epsilon * ctx.T / ctx.r[0]));
}
