#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "neklab/hamiltonian.hpp"
#include "neklab/polynomial.hpp"
#include "support.hpp"

using namespace neklab;
using neklab::testing::ex;

namespace {
const Ambient A11{1, 1};
const Ambient A20{2, 0};
const Ambient A21{2, 1};
}  // namespace

TEST_CASE("arith basics") {
  const auto x1 = Polynomial::variable(A21, A21.x(0));
  CHECK((x1 + (-x1)).is_zero());
  CHECK(arith(x1, x1 * -1.0, ArithOp::add).is_zero());
  CHECK(arith(x1, x1, ArithOp::mul) == Polynomial::monomial(A21, ex(A21, {{A21.x(0), 2}}), 1.0));
  const auto p = Polynomial::monomial(A21, ex(A21, {{A21.x(0), 2}, {A21.y(1), 1}}), 2.0);
  CHECK(scale(p, 0.5) == Polynomial::monomial(A21, ex(A21, {{A21.x(0), 2}, {A21.y(1), 1}}), 1.0));
  CHECK_THROWS_AS(x1 + Polynomial::variable(A20, 0), DimensionError);
  CHECK_THROWS_AS(poisson_bracket(x1, Polynomial::variable(A20, 0)), DimensionError);
}

TEST_CASE("stored coefficients are never zero") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    auto p = testing::random_polynomial(rng, A21, 4, 10);
    auto q = testing::random_polynomial(rng, A21, 4, 10);
    for (const auto* r : {&p, &q}) {
      for (const auto& [e, c] : r->terms()) CHECK(c != 0.0);
    }
    auto s = p * q - q * p;
    CHECK(s.is_zero());
  }
}

TEST_CASE("ring laws on random instances") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    auto p = testing::random_polynomial(rng, A21, 3, 8);
    auto q = testing::random_polynomial(rng, A21, 3, 8);
    auto r = testing::random_polynomial(rng, A21, 3, 8);
    CHECK((p + q) + r == p + (q + r));
    CHECK(p + q == q + p);
    CHECK((p * q) * r == p * (q * r));
    CHECK(p * q == q * p);
  }
}

TEST_CASE("gradient") {
  const auto x1 = Polynomial::variable(A21, A21.x(0));
  CHECK(derivative(x1 * x1, A21.x(0)) == x1 * 2.0);
  CHECK(derivative(Polynomial::action(A21, 0), A21.y(0)) == Polynomial::variable(A21, A21.y(0)));
  const auto m = Polynomial::monomial(A11, ex(A11, {{A11.x(0), 1}, {A11.xi(0), 1}, {A11.eta(0), 1}}), 1.0);
  CHECK(gradient(m)[A11.eta(0)] == Polynomial::monomial(A11, ex(A11, {{A11.x(0), 1}, {A11.xi(0), 1}}), 1.0));
  CHECK(gradient(m).size() == 4);
}

TEST_CASE("poisson bracket examples") {
  const auto x1 = Polynomial::variable(A21, A21.x(0));
  const auto y1 = Polynomial::variable(A21, A21.y(0));
  CHECK(poisson_bracket(x1, y1) == Polynomial::constant(A21, 1.0));
  CHECK(poisson_bracket(Polynomial::action(A21, 0), Polynomial::action(A21, 1)).is_zero());
  // {-y1, I1} = -(d(-y1)/dy1)(dI1/dx1) = x1
  CHECK(poisson_bracket(-y1, Polynomial::action(A21, 0)) == x1);
  const auto xi = Polynomial::variable(A21, A21.xi(0));
  const auto eta = Polynomial::variable(A21, A21.eta(0));
  CHECK(poisson_bracket(xi, eta) == Polynomial::constant(A21, 1.0));
  CHECK(poisson_bracket(x1, eta).is_zero());
}

TEST_CASE("bracket matches a finite-difference oracle") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    auto F = testing::random_real_polynomial(rng, A21, 4, 10);
    auto G = testing::random_real_polynomial(rng, A21, 4, 10);
    auto x = testing::random_vector(rng, A21.nvars(), -0.7, 0.7);
    auto d = [&](const Polynomial& P, int v) {
      const double h = 1e-5;
      auto a = x, b = x;
      a[v] += h;
      b[v] -= h;
      return (testing::naive_evaluate(P, a) - testing::naive_evaluate(P, b)) / (2 * h);
    };
    double oracle = 0.0;
    for (int j = 0; j < A21.n; ++j)
      oracle += d(F, A21.x(j)) * d(G, A21.y(j)) - d(F, A21.y(j)) * d(G, A21.x(j));
    for (int k = 0; k < A21.N; ++k)
      oracle += d(F, A21.xi(k)) * d(G, A21.eta(k)) - d(F, A21.eta(k)) * d(G, A21.xi(k));
    CHECK(evaluate(poisson_bracket(F, G), std::span<const double>(x)) == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("bracket identities are coefficient-exact") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    auto F = testing::random_polynomial(rng, A21, 4, 20);
    auto G = testing::random_polynomial(rng, A21, 4, 20);
    CHECK((poisson_bracket(F, G) + poisson_bracket(G, F)).is_zero());
  }
  for (int i = 0; i < 20; ++i) {
    auto F = testing::random_polynomial(rng, A21, 3, 6);
    auto G = testing::random_polynomial(rng, A21, 3, 6);
    auto H = testing::random_polynomial(rng, A21, 3, 6);
    auto jac = poisson_bracket(poisson_bracket(F, G), H) + poisson_bracket(poisson_bracket(G, H), F) +
               poisson_bracket(poisson_bracket(H, F), G);
    CHECK(jac.is_zero());
    auto leib = poisson_bracket(F * G, H) - (F * poisson_bracket(G, H) + poisson_bracket(F, H) * G);
    CHECK(leib.is_zero());
  }
}

TEST_CASE("identities with general floating coefficients") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    auto F = testing::random_real_polynomial(rng, A21, 3, 6);
    auto G = testing::random_real_polynomial(rng, A21, 3, 6);
    auto H = testing::random_real_polynomial(rng, A21, 3, 6);
    CHECK((poisson_bracket(F, G) + poisson_bracket(G, F)).is_zero());
    auto jac = poisson_bracket(poisson_bracket(F, G), H) + poisson_bracket(poisson_bracket(G, H), F) +
               poisson_bracket(poisson_bracket(H, F), G);
    // Rounding can survive the drop rule here; the residue must be tiny relative to the inputs.
    CHECK(jac.max_abs_coefficient() < 1e-12);
  }
}

TEST_CASE("majorant norm") {
  const auto p = Polynomial::monomial(A21, ex(A21, {{A21.x(0), 2}, {A21.y(1), 1}}), 2.0);
  CHECK(majorant_norm(p, 0.5, 1.0) == doctest::Approx(0.25));
  CHECK(majorant_norm(Polynomial(A21), 1.0, 1.0) == 0.0);
  const auto q = Polynomial::variable(A11, A11.x(0)) + Polynomial::variable(A11, A11.xi(0));
  CHECK(majorant_norm(q, 1.0, 2.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(majorant_norm(q, -1.0, 1.0), DomainError);
}

TEST_CASE("majorant norm is subadditive and bounds values") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    auto p = testing::random_real_polynomial(rng, A21, 5, 10);
    auto q = testing::random_real_polynomial(rng, A21, 5, 10);
    CHECK(majorant_norm(p + q, 0.7, 1.3) <= majorant_norm(p, 0.7, 1.3) + majorant_norm(q, 0.7, 1.3) + 1e-12);
  }
  auto p = testing::random_real_polynomial(rng, A21, 5, 15);
  for (int i = 0; i < 1000; ++i) {
    auto pt = testing::random_point(rng, A21, 1.5);
    CHECK(std::abs(evaluate(p, pt)) <= majorant_norm(p, pt.norm_z(), pt.norm_zeta()) * (1 + 1e-12));
  }
}

TEST_CASE("majorant norm scales under dilation") {
  std::mt19937_64 rng(6);
  auto p = testing::random_real_polynomial(rng, A21, 5, 10, 5);
  // Homogeneous of degree 5 in z and zeta jointly: scaling both radii by s scales by s^5.
  CHECK(majorant_norm(p, 0.6, 0.6) == doctest::Approx(std::pow(0.6, 5) * majorant_norm(p, 1.0, 1.0)));
}

TEST_CASE("evaluate") {
  PhasePoint pt({1.0, 0.0}, {});
  CHECK(evaluate(Polynomial::action(Ambient{1, 0}, 0), pt) == doctest::Approx(0.5));
  const Ambient a{1, 0};
  auto xy = Polynomial::variable(a, 0) * Polynomial::variable(a, 1);
  CHECK(evaluate(xy, PhasePoint({2.0, 3.0}, {})) == doctest::Approx(6.0));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    auto p = testing::random_real_polynomial(rng, A21, 5, 12);
    auto x = testing::random_vector(rng, A21.nvars(), -2, 2);
    const double oracle = testing::naive_evaluate(p, x);
    CHECK(evaluate(p, std::span<const double>(x)) == doctest::Approx(oracle).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS_AS(evaluate(xy, PhasePoint({1.0, 2.0, 3.0, 4.0}, {})), DimensionError);
}

TEST_CASE("compiled evaluation agrees with direct evaluation") {
  std::mt19937_64 rng(8);
  std::vector<Polynomial> ps;
  for (int i = 0; i < 5; ++i) ps.push_back(testing::random_real_polynomial(rng, A21, 6, 12));
  CompiledPolynomials cp(ps, A21.nvars());
  auto x = testing::random_vector(rng, A21.nvars());
  std::vector<double> out(ps.size());
  cp.evaluate(x, out);
  for (std::size_t i = 0; i < ps.size(); ++i)
    CHECK(out[i] == doctest::Approx(evaluate(ps[i], std::span<const double>(x))).epsilon(1e-13));
}

TEST_CASE("text format round-trips exactly") {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 100; ++i) {
    auto p = testing::random_real_polynomial(rng, A21, 6, 10);
    const std::string s = to_string(p);
    auto q = parse_polynomial(s, A21);
    CHECK(q == p);
    CHECK(to_string(q) == s);
  }
  CHECK(to_string(Polynomial(A21)) == "0");
  CHECK(parse_polynomial("0", A21).is_zero());
}

TEST_CASE("text format parsing") {
  auto p = parse_polynomial("0.5 * x1^2 + 0.5*y1^2 - 2 x1 y2 eta1 + xi1^2*eta1", A21);
  CHECK(p.coefficient(ex(A21, {{A21.x(0), 2}})) == 0.5);
  CHECK(p.coefficient(ex(A21, {{A21.y(0), 2}})) == 0.5);
  CHECK(p.coefficient(ex(A21, {{A21.x(0), 1}, {A21.y(1), 1}, {A21.eta(0), 1}})) == -2.0);
  CHECK(p.coefficient(ex(A21, {{A21.xi(0), 2}, {A21.eta(0), 1}})) == 1.0);
  CHECK(parse_polynomial("-x1 + 1e-3 * y2^3", A21).coefficient(ex(A21, {{A21.y(1), 3}})) == 1e-3);
  CHECK_THROWS_AS(parse_polynomial("x3", A21), ParseError);
  CHECK_THROWS_AS(parse_polynomial("xi2", A21), ParseError);
  CHECK_THROWS_AS(parse_polynomial("2 *", A21), ParseError);
  CHECK_THROWS_AS(parse_polynomial("", A21), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x1 x1^", A21), ParseError);
}
