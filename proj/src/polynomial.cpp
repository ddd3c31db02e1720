#include "neklab/polynomial.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace neklab {

namespace {

void require_same_ambient(const Polynomial& p, const Polynomial& q, const char* op) {
  if (!(p.ambient() == q.ambient())) {
    std::ostringstream msg;
    msg << op << ": ambient mismatch (n=" << p.ambient().n << ", N=" << p.ambient().N
        << ") vs (n=" << q.ambient().n << ", N=" << q.ambient().N << ")";
    throw DimensionError(msg.str());
  }
}

int total_degree(const Exponents& e) {
  int d = 0;
  for (auto v : e) d += v;
  return d;
}

// Sums products into keyed slots and remembers the absolute mass of every slot,
// so that results of exact cancellation can be told apart from genuine small terms.
class Accumulator {
 public:
  void add(const Exponents& e, double c) {
    auto& slot = slots_[e];
    slot.first += c;
    slot.second += std::abs(c);
  }

  Polynomial finish(Ambient ambient) && {
    Polynomial out(ambient);
    for (auto& [e, s] : slots_) {
      if (std::abs(s.first) > kDropTolerance * s.second) out.accumulate(e, s.first);
    }
    return out;
  }

 private:
  std::map<Exponents, std::pair<double, double>> slots_;
};

}  // namespace

Polynomial Polynomial::constant(Ambient ambient, double c) {
  Polynomial p(ambient);
  if (c != 0.0) p.terms_.emplace(Exponents(ambient.nvars(), 0), c);
  return p;
}

Polynomial Polynomial::variable(Ambient ambient, int var, double c) {
  if (var < 0 || var >= ambient.nvars()) throw DimensionError("variable index out of range");
  Exponents e(ambient.nvars(), 0);
  e[var] = 1;
  return monomial(ambient, std::move(e), c);
}

Polynomial Polynomial::monomial(Ambient ambient, Exponents exps, double c) {
  if (static_cast<int>(exps.size()) != ambient.nvars()) {
    throw DimensionError("exponent vector length does not match ambient");
  }
  Polynomial p(ambient);
  if (c != 0.0) p.terms_.emplace(std::move(exps), c);
  return p;
}

Polynomial Polynomial::action(Ambient ambient, int j) {
  if (j < 0 || j >= ambient.n) throw DimensionError("action index out of range");
  Exponents ex(ambient.nvars(), 0), ey(ambient.nvars(), 0);
  ex[ambient.x(j)] = 2;
  ey[ambient.y(j)] = 2;
  Polynomial p(ambient);
  p.terms_.emplace(std::move(ex), 0.5);
  p.terms_.emplace(std::move(ey), 0.5);
  return p;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

int Polynomial::min_degree() const {
  if (terms_.empty()) return -1;
  int d = total_degree(terms_.begin()->first);
  for (const auto& [e, c] : terms_) d = std::min(d, total_degree(e));
  return d;
}

double Polynomial::coefficient(const Exponents& exps) const {
  auto it = terms_.find(exps);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial Polynomial::truncated(int max_degree) const {
  Polynomial out(ambient_);
  for (const auto& [e, c] : terms_) {
    if (total_degree(e) <= max_degree) out.terms_.emplace_hint(out.terms_.end(), e, c);
  }
  return out;
}

Polynomial Polynomial::restricted_to_zeta_zero() const {
  Polynomial out(ambient_);
  const int first = 2 * ambient_.n;
  for (const auto& [e, c] : terms_) {
    bool has_zeta = std::any_of(e.begin() + first, e.end(), [](auto v) { return v != 0; });
    if (!has_zeta) out.terms_.emplace_hint(out.terms_.end(), e, c);
  }
  return out;
}

bool Polynomial::depends_on_z() const {
  const int last = 2 * ambient_.n;
  for (const auto& [e, c] : terms_) {
    for (int v = 0; v < last; ++v)
      if (e[v] != 0) return true;
  }
  return false;
}

bool Polynomial::depends_on_zeta() const {
  const int first = 2 * ambient_.n;
  for (const auto& [e, c] : terms_) {
    for (int v = first; v < ambient_.nvars(); ++v)
      if (e[v] != 0) return true;
  }
  return false;
}

void Polynomial::accumulate(const Exponents& exps, double c) {
  if (static_cast<int>(exps.size()) != ambient_.nvars()) {
    throw DimensionError("exponent vector length does not match ambient");
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(exps, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void Polynomial::drop_below(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_ambient(*this, other, "add");
  for (const auto& [e, c] : other.terms_) {
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (inserted) continue;
    const double before = it->second;
    it->second += c;
    if (std::abs(it->second) <= kDropTolerance * (std::abs(before) + std::abs(c))) terms_.erase(it);
  }
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same_ambient(*this, other, "sub");
  for (const auto& [e, c] : other.terms_) {
    auto [it, inserted] = terms_.try_emplace(e, -c);
    if (inserted) continue;
    const double before = it->second;
    it->second -= c;
    if (std::abs(it->second) <= kDropTolerance * (std::abs(before) + std::abs(c))) terms_.erase(it);
  }
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  std::erase_if(terms_, [](const auto& kv) { return kv.second == 0.0; });
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  require_same_ambient(p, q, "mul");
  Accumulator acc;
  Exponents e(p.ambient().nvars());
  for (const auto& [ep, cp] : p.terms()) {
    for (const auto& [eq, cq] : q.terms()) {
      for (std::size_t v = 0; v < e.size(); ++v) e[v] = static_cast<std::uint8_t>(ep[v] + eq[v]);
      acc.add(e, cp * cq);
    }
  }
  return std::move(acc).finish(p.ambient());
}

Polynomial arith(const Polynomial& p, const Polynomial& q, ArithOp op) {
  switch (op) {
    case ArithOp::add: return p + q;
    case ArithOp::sub: return p - q;
    case ArithOp::mul: return p * q;
  }
  throw std::logic_error("unknown ArithOp");
}

Polynomial scale(const Polynomial& p, double s) { return p * s; }

Polynomial derivative(const Polynomial& p, int var) {
  if (var < 0 || var >= p.ambient().nvars()) throw DimensionError("derivative: variable out of range");
  Polynomial out(p.ambient());
  for (const auto& [e, c] : p.terms()) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    out.accumulate(d, c * e[var]);
  }
  return out;
}

std::vector<Polynomial> gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(p.ambient().nvars());
  for (int v = 0; v < p.ambient().nvars(); ++v) g.push_back(derivative(p, v));
  return g;
}

Polynomial poisson_bracket(const Polynomial& F, const Polynomial& G) {
  require_same_ambient(F, G, "poisson_bracket");
  const Ambient amb = F.ambient();
  // Canonical pairs (q, p): (x_j, y_j) and (xi_k, eta_k).
  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < amb.n; ++j) pairs.emplace_back(amb.x(j), amb.y(j));
  for (int k = 0; k < amb.N; ++k) pairs.emplace_back(amb.xi(k), amb.eta(k));

  Accumulator acc;
  Exponents e(amb.nvars());
  for (const auto& [ef, cf] : F.terms()) {
    for (const auto& [eg, cg] : G.terms()) {
      for (auto [q, p] : pairs) {
        // Both contributions land on the same monomial ef + eg - e_q - e_p.
        const double w = double(ef[q]) * eg[p] - double(ef[p]) * eg[q];
        if (w == 0.0) continue;
        for (std::size_t v = 0; v < e.size(); ++v) e[v] = static_cast<std::uint8_t>(ef[v] + eg[v]);
        e[q] -= 1;
        e[p] -= 1;
        // Keep the individual products so cancellation is measured against them.
        const double a = double(ef[q]) * eg[p] * cf * cg;
        const double b = double(ef[p]) * eg[q] * cf * cg;
        if (a != 0.0) acc.add(e, a);
        if (b != 0.0) acc.add(e, -b);
      }
    }
  }
  return std::move(acc).finish(amb);
}

double majorant_norm(const Polynomial& p, double r2, double r3) {
  if (r2 < 0.0 || r3 < 0.0 || std::isnan(r2) || std::isnan(r3)) {
    throw DomainError("majorant_norm: radii must be non-negative");
  }
  const int nz = 2 * p.ambient().n;
  double total = 0.0;
  for (const auto& [e, c] : p.terms()) {
    int dz = 0, dzeta = 0;
    for (int v = 0; v < static_cast<int>(e.size()); ++v) (v < nz ? dz : dzeta) += e[v];
    total += std::abs(c) * std::pow(r2, dz) * std::pow(r3, dzeta);
  }
  return total;
}

double evaluate(const Polynomial& p, std::span<const double> point) {
  if (static_cast<int>(point.size()) != p.ambient().nvars()) {
    throw DimensionError("evaluate: point dimension does not match ambient");
  }
  double total = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double m = c;
    for (std::size_t v = 0; v < e.size(); ++v) {
      for (int k = 0; k < e[v]; ++k) m *= point[v];
    }
    total += m;
  }
  return total;
}

namespace {

std::string variable_name(Ambient amb, int var) {
  if (var < amb.n) return "x" + std::to_string(var + 1);
  if (var < 2 * amb.n) return "y" + std::to_string(var - amb.n + 1);
  if (var < 2 * amb.n + amb.N) return "xi" + std::to_string(var - 2 * amb.n + 1);
  return "eta" + std::to_string(var - 2 * amb.n - amb.N + 1);
}

std::string format_coefficient(double c) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, c);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    if (first) {
      out += format_coefficient(c);
    } else {
      out += c < 0 ? " - " : " + ";
      out += format_coefficient(std::abs(c));
    }
    first = false;
    bool star = false;
    for (int v = 0; v < static_cast<int>(e.size()); ++v) {
      if (e[v] == 0) continue;
      out += star ? " " : " * ";
      star = true;
      out += variable_name(p.ambient(), v);
      if (e[v] > 1) out += "^" + std::to_string(e[v]);
    }
  }
  return out;
}

namespace {

class PolynomialParser {
 public:
  PolynomialParser(std::string_view text, Ambient amb) : s_(text), amb_(amb) {}

  Polynomial parse() {
    Polynomial out(amb_);
    skip_ws();
    if (at_end()) fail("empty polynomial");
    bool first = true;
    while (!at_end()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-' between terms");
      }
      first = false;
      auto [e, c] = term();
      out.accumulate(e, sign * c);
      skip_ws();
    }
    return out;
  }

 private:
  std::pair<Exponents, double> term() {
    Exponents e(amb_.nvars(), 0);
    double c = 1.0;
    bool have_factor = false;
    if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
      c = number();
      have_factor = true;
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected variable after '*'");
      }
    }
    while (std::isalpha(static_cast<unsigned char>(peek()))) {
      int var = variable();
      int power = 1;
      skip_ws();
      if (peek() == '^') {
        ++pos_;
        skip_ws();
        power = integer();
        skip_ws();
      }
      if (e[var] + power > 255) fail("exponent too large");
      e[var] = static_cast<std::uint8_t>(e[var] + power);
      have_factor = true;
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected variable after '*'");
      }
    }
    if (!have_factor) fail("expected coefficient or variable");
    return {e, c};
  }

  double number() {
    double v = 0.0;
    auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ = res.ptr - s_.data();
    return v;
  }

  int integer() {
    int v = 0;
    auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (res.ec != std::errc() || v < 0) fail("malformed exponent");
    pos_ = res.ptr - s_.data();
    return v;
  }

  int variable() {
    std::size_t start = pos_;
    while (std::isalpha(static_cast<unsigned char>(peek()))) ++pos_;
    std::string_view name = s_.substr(start, pos_ - start);
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("variable needs a 1-based index");
    int idx = integer();
    if (idx < 1) fail("variable index must be >= 1");
    --idx;
    if (name == "x" && idx < amb_.n) return amb_.x(idx);
    if (name == "y" && idx < amb_.n) return amb_.y(idx);
    if (name == "xi" && idx < amb_.N) return amb_.xi(idx);
    if (name == "eta" && idx < amb_.N) return amb_.eta(idx);
    pos_ = start;
    fail("unknown variable '" + std::string(name) + std::to_string(idx + 1) + "'");
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("polynomial parse error at offset " + std::to_string(pos_) + ": " + msg, pos_);
  }

  std::string_view s_;
  Ambient amb_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view text, Ambient ambient) {
  return PolynomialParser(text, ambient).parse();
}

CompiledPolynomials::CompiledPolynomials(std::span<const Polynomial> polys, int nvars)
    : outputs_(polys.size()), nvars_(nvars) {
  for (std::size_t k = 0; k < polys.size(); ++k) {
    if (polys[k].ambient().nvars() != nvars) throw DimensionError("compile: ambient mismatch");
    for (const auto& [e, c] : polys[k].terms()) {
      Term t{c, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(factors_.size()), 0};
      for (int v = 0; v < nvars; ++v) {
        if (e[v] == 0) continue;
        factors_.push_back({static_cast<std::uint32_t>(v), e[v]});
        max_power_ = std::max<int>(max_power_, e[v]);
      }
      t.end = static_cast<std::uint32_t>(factors_.size());
      terms_.push_back(t);
    }
  }
  pow_.assign(static_cast<std::size_t>(nvars_) * (max_power_ + 1), 1.0);
}

void CompiledPolynomials::evaluate(std::span<const double> point, std::span<double> out) const {
  if (static_cast<int>(point.size()) != nvars_ || out.size() != outputs_) {
    throw DimensionError("compiled evaluate: size mismatch");
  }
  const int stride = max_power_ + 1;
  for (int v = 0; v < nvars_; ++v) {
    double* row = pow_.data() + static_cast<std::size_t>(v) * stride;
    for (int k = 1; k <= max_power_; ++k) row[k] = row[k - 1] * point[v];
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (const Term& t : terms_) {
    double m = t.coef;
    for (std::uint32_t f = t.begin; f < t.end; ++f) {
      m *= pow_[static_cast<std::size_t>(factors_[f].var) * stride + factors_[f].power];
    }
    out[t.output] += m;
  }
}

}  // namespace neklab
