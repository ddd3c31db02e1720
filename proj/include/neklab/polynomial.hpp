#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace neklab {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Phase-space shape: n elliptic pairs (x, y) and N transverse pairs (xi, eta).
/// Variables are laid out as x_1..x_n, y_1..y_n, xi_1..xi_N, eta_1..eta_N.
struct Ambient {
  int n = 0;
  int N = 0;

  int nvars() const { return 2 * n + 2 * N; }
  int x(int j) const { return j; }
  int y(int j) const { return n + j; }
  int xi(int k) const { return 2 * n + k; }
  int eta(int k) const { return 2 * n + N + k; }
  bool is_z(int var) const { return var < 2 * n; }

  friend bool operator==(const Ambient&, const Ambient&) = default;
};

using Exponents = std::vector<std::uint8_t>;

/// Relative threshold under which a coefficient produced by an operation is dropped.
inline constexpr double kDropTolerance = 1e-14;

/// Sparse polynomial with real coefficients. Stored terms never have a zero coefficient.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, double>;

  Polynomial() = default;
  explicit Polynomial(Ambient ambient) : ambient_(ambient) {}

  static Polynomial constant(Ambient ambient, double c);
  static Polynomial variable(Ambient ambient, int var, double c = 1.0);
  static Polynomial monomial(Ambient ambient, Exponents exps, double c);
  /// I_j = (x_j^2 + y_j^2) / 2, zero-based j.
  static Polynomial action(Ambient ambient, int j);

  const Ambient& ambient() const { return ambient_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  /// Lowest total degree among stored terms; -1 for the zero polynomial.
  int min_degree() const;
  double coefficient(const Exponents& exps) const;
  double max_abs_coefficient() const;

  Polynomial truncated(int max_degree) const;
  /// Drops every term that involves a transverse variable.
  Polynomial restricted_to_zeta_zero() const;
  bool depends_on_z() const;
  bool depends_on_zeta() const;

  /// Adds c to the coefficient at exps without any cleanup.
  void accumulate(const Exponents& exps, double c);
  /// Removes coefficients with |c| <= tol (and exact zeros).
  void drop_below(double tol);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator-(Polynomial p) { return p *= -1.0; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  Ambient ambient_;
  TermMap terms_;
};

enum class ArithOp { add, sub, mul };

/// Binary arithmetic in functional form; equivalent to the operators.
Polynomial arith(const Polynomial& p, const Polynomial& q, ArithOp op);
Polynomial scale(const Polynomial& p, double s);

Polynomial derivative(const Polynomial& p, int var);
std::vector<Polynomial> gradient(const Polynomial& p);

/// {F,G} = sum_j (F_xj G_yj - F_yj G_xj) + sum_k (F_xik G_etak - F_etak G_xik).
Polynomial poisson_bracket(const Polynomial& F, const Polynomial& G);

/// sum |c| r2^(z-degree) r3^(zeta-degree): bounds sup |p| on {|z| <= r2, |zeta| <= r3}.
double majorant_norm(const Polynomial& p, double r2, double r3);

/// Evaluates at a flat point in variable order.
double evaluate(const Polynomial& p, std::span<const double> point);

/// Prints as `c * x1^2 y1 + c * xi1 eta1`; coefficients use the shortest exact decimal form.
std::string to_string(const Polynomial& p);
Polynomial parse_polynomial(std::string_view text, Ambient ambient);

/// Flat representation for fast repeated evaluation of one or several polynomials
/// that share a power table.
class CompiledPolynomials {
 public:
  CompiledPolynomials() = default;
  CompiledPolynomials(std::span<const Polynomial> polys, int nvars);

  std::size_t outputs() const { return outputs_; }
  /// Writes the value of each compiled polynomial into out (size outputs()).
  void evaluate(std::span<const double> point, std::span<double> out) const;

 private:
  struct Term {
    double coef;
    std::uint32_t output;
    std::uint32_t begin;
    std::uint32_t end;
  };
  struct Factor {
    std::uint32_t var;
    std::uint32_t power;
  };
  std::size_t outputs_ = 0;
  int nvars_ = 0;
  int max_power_ = 0;
  std::vector<Term> terms_;
  std::vector<Factor> factors_;
  mutable std::vector<double> pow_;
};

}  // namespace neklab
