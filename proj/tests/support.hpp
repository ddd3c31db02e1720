// Shared helpers for the test binaries.
#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "neklab/diophantine.hpp"
#include "neklab/hamiltonian.hpp"
#include "neklab/polynomial.hpp"

namespace neklab::testing {

/// Random polynomial with up to `terms` monomials of total degree <= max_degree.
/// Coefficients are small integers divided by powers of two, so sums and products stay exact.
inline Polynomial random_polynomial(std::mt19937_64& rng, Ambient amb, int max_degree, int terms,
                                    int min_degree = 0) {
  std::uniform_int_distribution<int> var(0, amb.nvars() - 1);
  std::uniform_int_distribution<int> deg(min_degree, max_degree);
  std::uniform_int_distribution<int> num(-8, 8);
  Polynomial p(amb);
  for (int t = 0; t < terms; ++t) {
    Exponents e(amb.nvars(), 0);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) e[var(rng)] += 1;
    int c = num(rng);
    if (c == 0) c = 1;
    p.accumulate(e, c / 4.0);
  }
  return p;
}

/// Same, with general floating point coefficients in [-1, 1].
inline Polynomial random_real_polynomial(std::mt19937_64& rng, Ambient amb, int max_degree, int terms,
                                         int min_degree = 0) {
  std::uniform_int_distribution<int> var(0, amb.nvars() - 1);
  std::uniform_int_distribution<int> deg(min_degree, max_degree);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Polynomial p(amb);
  for (int t = 0; t < terms; ++t) {
    Exponents e(amb.nvars(), 0);
    const int d = deg(rng);
    for (int k = 0; k < d; ++k) e[var(rng)] += 1;
    p.accumulate(e, coef(rng));
  }
  return p;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, int dim, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(dim);
  for (double& x : v) x = u(rng);
  return v;
}

inline PhasePoint random_point(std::mt19937_64& rng, Ambient amb, double scale = 1.0) {
  return PhasePoint(random_vector(rng, 2 * amb.n, -scale, scale), random_vector(rng, 2 * amb.N, -scale, scale));
}

/// Naive term-by-term evaluation using std::pow, independent of the library's loops.
inline double naive_evaluate(const Polynomial& p, const std::vector<double>& x) {
  double s = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double m = c;
    for (std::size_t v = 0; v < e.size(); ++v) m *= std::pow(x[v], e[v]);
    s += m;
  }
  return s;
}

inline Exponents ex(Ambient amb, std::initializer_list<std::pair<int, int>> powers) {
  Exponents e(amb.nvars(), 0);
  for (auto [v, p] : powers) e[v] = static_cast<std::uint8_t>(p);
  return e;
}

// Brute force over q and every integer p within distance 1 of q omega.
inline DirichletResult brute_force_dirichlet(const std::vector<double>& omega, std::int64_t Q) {
  DirichletResult best;
  best.err = INFINITY;
  for (std::int64_t q = 1; q <= Q; ++q) {
    std::vector<std::int64_t> p;
    double err = 0.0;
    for (double w : omega) {
      const double v = static_cast<double>(q) * w;
      double bd = INFINITY;
      std::int64_t bp = 0;
      for (auto c = static_cast<std::int64_t>(std::floor(v)) - 1; c <= static_cast<std::int64_t>(std::floor(v)) + 2; ++c) {
        const double d = std::abs(v - static_cast<double>(c));
        if (d < bd || (d == bd && c % 2 == 0)) {
          bd = d;
          bp = c;
        }
      }
      p.push_back(bp);
      err = std::max(err, bd);
    }
    if (err < best.err) best = {q, p, err};
  }
  return best;
}

inline double dist_to_2pi_lattice(double v) {
  constexpr double two_pi = 2 * std::numbers::pi;
  return std::abs(v - two_pi * std::round(v / two_pi));
}

}  // namespace neklab::testing
