#include "neklab/normal_form.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <sstream>

#include "neklab/diophantine.hpp"

namespace neklab {

namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// i^k for integer k >= 0.
cplx ipow(int k) {
  switch (k & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// Complex polynomial in (w, wbar, zeta) using the real layout: the x_j slot holds the
// power of w_j = x_j + i y_j and the y_j slot the power of wbar_j.
struct ComplexPoly {
  std::map<Exponents, std::pair<cplx, double>> slots;  // value, absolute mass

  void add(const Exponents& e, cplx c, double mass) {
    auto& s = slots[e];
    s.first += c;
    s.second += mass;
  }
};

struct PairTerm {
  int a;  // power on the first slot of the pair
  int b;  // power on the second slot
  cplx c;
};

// Expands the z-part of every term pair by pair and hands each combination to sink.
void expand_pairs(const Exponents& e, int n, const std::function<std::vector<PairTerm>(int, int, int)>& per_pair,
                  const std::function<void(const Exponents&, cplx)>& sink) {
  std::vector<std::vector<PairTerm>> options(n);
  for (int j = 0; j < n; ++j) options[j] = per_pair(j, e[j], e[n + j]);
  Exponents cur = e;
  std::function<void(int, cplx)> rec = [&](int j, cplx c) {
    if (j == n) {
      sink(cur, c);
      return;
    }
    for (const auto& opt : options[j]) {
      cur[j] = static_cast<std::uint8_t>(opt.a);
      cur[n + j] = static_cast<std::uint8_t>(opt.b);
      rec(j + 1, c * opt.c);
    }
  };
  rec(0, cplx(1.0, 0.0));
}

bool cancelled(const std::pair<cplx, double>& slot) { return std::abs(slot.first) <= kDropTolerance * slot.second; }

ComplexPoly to_complex(const Polynomial& f) {
  const int n = f.ambient().n;
  ComplexPoly out;
  // x^p y^q = ((w + wbar)/2)^p ((w - wbar)/(2i))^q
  auto per_pair = [](int, int p, int q) {
    std::vector<PairTerm> v;
    const cplx pref = std::pow(0.5, p + q) * ipow(3 * q);  // (-i)^q = i^{3q}
    for (int s = 0; s <= p; ++s) {
      for (int t = 0; t <= q; ++t) {
        const double sgn = ((q - t) & 1) ? -1.0 : 1.0;
        v.push_back({s + t, (p - s) + (q - t), pref * (binomial(p, s) * binomial(q, t) * sgn)});
      }
    }
    return v;
  };
  for (const auto& [e, c] : f.terms()) {
    expand_pairs(e, n, per_pair, [&](const Exponents& k, cplx w) { out.add(k, c * w, std::abs(c * w)); });
  }
  return out;
}

Polynomial to_real(const ComplexPoly& F, Ambient amb) {
  const int n = amb.n;
  // w^a wbar^b = (x + iy)^a (x - iy)^b
  auto per_pair = [](int, int a, int b) {
    std::vector<PairTerm> v;
    for (int s = 0; s <= a; ++s) {
      for (int t = 0; t <= b; ++t) {
        const cplx c = binomial(a, s) * binomial(b, t) * ipow(a - s) * ipow(3 * (b - t));
        v.push_back({s + t, (a - s) + (b - t), c});
      }
    }
    return v;
  };
  std::map<Exponents, std::pair<double, double>> acc;
  for (const auto& [e, s] : F.slots) {
    const cplx c = s.first;
    if (c == cplx(0, 0)) continue;
    expand_pairs(e, n, per_pair, [&](const Exponents& k, cplx w) {
      const double re = (c * w).real();
      auto& slot = acc[k];
      slot.first += re;
      slot.second += std::abs(c * w);
    });
  }
  Polynomial out(amb);
  for (const auto& [e, s] : acc) {
    if (std::abs(s.first) > kDropTolerance * s.second) out.accumulate(e, s.first);
  }
  return out;
}

// Integer frequency index nu of a complex monomial: mu T / (2 pi).
std::vector<long> resonance_indices(const std::vector<double>& omega0, double T) {
  std::vector<long> nu(omega0.size());
  for (std::size_t j = 0; j < omega0.size(); ++j) nu[j] = std::lround(omega0[j] * T / kTwoPi);
  return nu;
}

long frequency_index(const Exponents& e, const std::vector<long>& nu) {
  const int n = static_cast<int>(nu.size());
  long s = 0;
  for (int j = 0; j < n; ++j) s += (static_cast<long>(e[j]) - e[n + j]) * nu[j];
  return s;
}

double frequency(const Exponents& e, const std::vector<double>& omega0) {
  const int n = static_cast<int>(omega0.size());
  double mu = 0.0;
  for (int j = 0; j < n; ++j) mu += (static_cast<double>(e[j]) - e[n + j]) * omega0[j];
  return mu;
}

void check_frequency_dim(const Polynomial& f, const std::vector<double>& omega0) {
  if (static_cast<int>(omega0.size()) != f.ambient().n) throw DimensionError("omega0 must have length n");
}

}  // namespace

void require_periodic(const std::vector<double>& omega0, double T) {
  if (!(T > 0)) throw PreconditionError("period T must be positive");
  for (double w : omega0) {
    const double v = T * w;
    if (std::abs(v - kTwoPi * std::round(v / kTwoPi)) > 1e-9) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "T * omega0 is not in 2 pi Z^n (component " << v << ")";
      throw PreconditionError(msg.str());
    }
  }
}

Polynomial frequency_hamiltonian(Ambient amb, const std::vector<double>& omega0) {
  Polynomial h(amb);
  for (int j = 0; j < amb.n; ++j) h += Polynomial::action(amb, j) * omega0[j];
  return h;
}

Polynomial twist_hamiltonian(Ambient amb, const Eigen::MatrixXd& A, const std::vector<double>& I0) {
  std::vector<Polynomial> D;
  for (int j = 0; j < amb.n; ++j) D.push_back(Polynomial::action(amb, j) - Polynomial::constant(amb, I0[j]));
  Polynomial g0(amb);
  for (int i = 0; i < amb.n; ++i) {
    for (int j = 0; j < amb.n; ++j) {
      if (A(i, j) != 0.0) g0 += (D[i] * D[j]) * (0.5 * A(i, j));
    }
  }
  return g0;
}

PhasePoint exact_flow_h(const PhasePoint& pt, const std::vector<double>& omega0, double t) {
  const std::size_t n = pt.z.size() / 2;
  if (omega0.size() != n) throw DimensionError("exact_flow_h: omega0 must have length n");
  PhasePoint out = pt;
  for (std::size_t j = 0; j < n; ++j) {
    const double c = std::cos(omega0[j] * t), s = std::sin(omega0[j] * t);
    const double x = pt.z[j], y = pt.z[n + j];
    out.z[j] = c * x + s * y;
    out.z[n + j] = -s * x + c * y;
  }
  return out;
}

Polynomial resonant_average(const Polynomial& f, const std::vector<double>& omega0, double T) {
  check_frequency_dim(f, omega0);
  require_periodic(omega0, T);
  const auto nu = resonance_indices(omega0, T);
  ComplexPoly F = to_complex(f);
  ComplexPoly keep;
  for (const auto& [e, s] : F.slots) {
    if (!cancelled(s) && frequency_index(e, nu) == 0) keep.slots.emplace(e, s);
  }
  return to_real(keep, f.ambient());
}

Polynomial homological_generator(const Polynomial& f, const std::vector<double>& omega0, double T) {
  check_frequency_dim(f, omega0);
  require_periodic(omega0, T);
  const auto nu = resonance_indices(omega0, T);
  ComplexPoly F = to_complex(f);
  ComplexPoly phi;
  for (const auto& [e, s] : F.slots) {
    if (cancelled(s) || frequency_index(e, nu) == 0) continue;
    // (1/T) int_0^T t e^{-i mu t} dt = 1 / (-i mu) when mu T is a non-zero multiple of 2 pi.
    const double mu = frequency(e, omega0);
    phi.slots.emplace(e, std::make_pair(s.first / cplx(0.0, -mu), s.second / std::abs(mu)));
  }
  return to_real(phi, f.ambient());
}

QuadratureAverage quadrature_average(const Polynomial& f, const std::vector<double>& omega0, double T, int nodes) {
  check_frequency_dim(f, omega0);
  require_periodic(omega0, T);
  if (nodes < 1) throw PreconditionError("quadrature_average: nodes must be >= 1");
  const int n = f.ambient().n;
  const auto nu = resonance_indices(omega0, T);

  QuadratureAverage out;
  long max_nu = 0;
  for (const auto& [e, c] : f.terms()) {
    // Largest |nu| among the complex monomials of this real term: all of a-b range over +-(p+q).
    long m = 0;
    for (int j = 0; j < n; ++j) m += static_cast<long>(e[j] + e[n + j]) * std::labs(nu[j]);
    max_nu = std::max(max_nu, m);
  }
  out.required_nodes = static_cast<int>(2 * max_nu + 1);
  out.nodes_sufficient = nodes >= out.required_nodes;
  if (!out.nodes_sufficient) {
    out.warning = "quadrature_average: " + std::to_string(nodes) + " nodes below the required " +
                  std::to_string(out.required_nodes);
  }

  // Average of f o X_h^{t_k}: substitute x -> c x + s y, y -> -s x + c y pair by pair.
  std::map<Exponents, std::pair<double, double>> acc;
  for (int k = 0; k < nodes; ++k) {
    const double t = T * k / nodes;
    std::vector<double> cs(n), sn(n);
    for (int j = 0; j < n; ++j) {
      cs[j] = std::cos(omega0[j] * t);
      sn[j] = std::sin(omega0[j] * t);
    }
    auto per_pair = [&](int j, int p, int q) {
      std::vector<PairTerm> v;
      for (int u = 0; u <= p; ++u) {
        const double cu = binomial(p, u) * std::pow(cs[j], u) * std::pow(sn[j], p - u);
        for (int w = 0; w <= q; ++w) {
          const double cw = binomial(q, w) * std::pow(-sn[j], w) * std::pow(cs[j], q - w);
          v.push_back({u + w, (p - u) + (q - w), cplx(cu * cw, 0.0)});
        }
      }
      return v;
    };
    for (const auto& [e, c] : f.terms()) {
      expand_pairs(e, n, per_pair, [&](const Exponents& key, cplx w) {
        const double v = c * w.real() / nodes;
        auto& slot = acc[key];
        slot.first += v;
        slot.second += std::abs(v);
      });
    }
  }
  out.average = Polynomial(f.ambient());
  // Trigonometric sums that vanish analytically leave rounding residue of order 1e-16 times the mass.
  for (const auto& [e, s] : acc) {
    if (std::abs(s.first) > 1e-12 * s.second) out.average.accumulate(e, s.first);
  }
  return out;
}

Polynomial lie_transform(const Polynomial& F, const Polynomial& phi, int degree_cap, int max_terms) {
  if (degree_cap < F.degree()) throw PreconditionError("lie_transform: degree_cap must be >= deg F");
  if (phi.is_zero()) return F;
  // Brackets with a generator of lowest degree >= 2 never lower the degree, so
  // intermediate terms may be truncated safely; otherwise keep them whole.
  const bool monotone = phi.min_degree() >= 2;
  const bool preserves_degree = phi.min_degree() == 2;
  Polynomial result = F;
  Polynomial term = F;
  for (int k = 1; k <= max_terms; ++k) {
    term = poisson_bracket(term, phi) * (1.0 / k);
    if (monotone) term = term.truncated(degree_cap);
    if (term.is_zero()) break;
    result += term;
    if (preserves_degree && term.max_abs_coefficient() < 1e-17 * result.max_abs_coefficient()) break;
  }
  return result.truncated(degree_cap);
}

StepResult one_step(const AveragingContext& ctx, const Polynomial& g, const Polynomial& f, const Polynomial& Lambda) {
  const Ambient amb = f.ambient();
  if (!(g.ambient() == amb) || !(Lambda.ambient() == amb)) throw DimensionError("one_step: ambient mismatch");
  check_frequency_dim(f, ctx.omega0);
  require_periodic(ctx.omega0, ctx.T);
  const Polynomial h = frequency_hamiltonian(amb, ctx.omega0);
  if (!poisson_bracket(g, h).is_zero()) throw PreconditionError("one_step: {g, h} must vanish");

  const Polynomial g0 = twist_hamiltonian(amb, ctx.A, ctx.I0);
  const Polynomial fbar = resonant_average(f, ctx.omega0, ctx.T);
  StepResult out;
  out.phi = homological_generator(f, ctx.omega0, ctx.T);
  out.g_plus = g + fbar;

  const Polynomial kL = Lambda * ctx.kappa;
  const Polynomial H = h + g0 + g + f + kL;
  int cap = ctx.degree_cap > 0 ? ctx.degree_cap : f.degree() + 2 * ctx.m;
  cap = std::max(cap, H.degree());
  const Polynomial HPhi = lie_transform(H, out.phi, cap);
  out.f_plus = (HPhi - (h + g0 + out.g_plus + kL)).truncated(cap);

  StepReport& rep = out.report;
  const auto& r = ctx.r;
  const auto& rho = ctx.rho;
  rep.r = r;
  rep.rho = rho;
  rep.degree_cap = cap;
  rep.epsilon = majorant_norm(f, r[1], r[2]);
  rep.delta = majorant_norm(g, r[1], r[2]);
  rep.rho_min = std::min({rho[0] / r[1], rho[1], rho[2]});
  rep.smallness_lhs = rep.epsilon * ctx.T;
  rep.smallness_rhs = rep.rho_min * rep.rho_min / 9.0;
  rep.smallness_passed = rep.smallness_lhs < rep.smallness_rhs;
  rep.displacement_bound = 3.0 * rep.epsilon * ctx.T / rep.rho_min;
  const double normA = ctx.A.size() ? l1_operator_norm(ctx.A) : 0.0;
  rep.f_plus_bound = (6.0 * normA * r[0] * r[1] / rho[1] + 36.0 * (rep.delta + rep.epsilon) / (rep.rho_min * rep.rho_min) +
                      3.0 * ctx.kappa * ctx.C_Lambda * r[2] / (2.0 * rho[2])) *
                     rep.epsilon * ctx.T;
  rep.f_plus_norm = majorant_norm(out.f_plus, std::max(0.0, r[1] - rho[1]), std::max(0.0, r[2] - rho[2]));
  rep.g_plus_norm = majorant_norm(out.g_plus, r[1], r[2]);
  return out;
}

bool ConditionReport::passed() const {
  for (const auto& c : items)
    if (!c.passed) return false;
  return true;
}

const Condition* ConditionReport::find(const std::string& name) const {
  for (const auto& c : items)
    if (c.name == name) return &c;
  return nullptr;
}

NormalFormResult iterate_normal_form(const AveragingContext& ctx, const Polynomial& f, const Polynomial& Lambda) {
  if (ctx.m < 1) throw PreconditionError("iterate_normal_form: m must be >= 1");
  const Ambient amb = f.ambient();
  const int m = ctx.m;
  const auto& r = ctx.r;
  NormalFormResult out;
  out.degree_cap = ctx.degree_cap > 0 ? ctx.degree_cap : std::max(f.degree(), 0) + 2 * m;
  out.epsilon = majorant_norm(f, 3 * r[1], 3 * r[2]);
  const double eps = out.epsilon, delta = 0.0, T = ctx.T;
  const double normA = ctx.A.size() ? l1_operator_norm(ctx.A) : 0.0;

  auto add = [&](std::string name, std::string rel, double lhs, double rhs) {
    const bool ok = rel == "<" ? lhs < rhs : lhs <= rhs;
    out.conditions.items.push_back({std::move(name), std::move(rel), lhs, rhs, ok, rhs - lhs});
  };
  out.conditions.lemma = "iteration_step_sequence";
  add("r1 < 2 r2^2", "<", r[0], 2 * r[1] * r[1]);
  if (amb.N > 0) add("r1 < 2 r2 r3", "<", r[0], 2 * r[1] * r[2]);
  add("m^2 eps T < r1^2 / (81 r2^2)", "<", double(m) * m * eps * T, r[0] * r[0] / (81 * r[1] * r[1]));
  add("twist + remainder + transverse terms <= 1/2", "<=",
      54.0 * m * normA * r[0] * T + 324.0 * (delta + 2 * eps) * m * m * r[1] * r[1] * T / (r[0] * r[0]) +
          (amb.N > 0 ? 4.5 * ctx.kappa * ctx.C_Lambda * m * T : 0.0),
      0.5);

  Polynomial g(amb);
  Polynomial fj = f;
  out.norms.push_back(eps);
  for (int j = 0; j < m; ++j) {
    AveragingContext step = ctx;
    step.degree_cap = out.degree_cap;
    for (int i = 0; i < 3; ++i) {
      step.r[i] = 3 * r[i] - j * r[i] / m;
      step.rho[i] = r[i] / m;
    }
    StepResult res = one_step(step, g, fj, Lambda);
    out.generators.push_back(res.phi);
    out.steps.push_back(res.report);
    g = std::move(res.g_plus);
    fj = std::move(res.f_plus);
    out.norms.push_back(res.report.f_plus_norm);
  }
  out.g_hat = std::move(g);
  out.f_hat = std::move(fj);
  out.psi_displacement_bound = 18.0 * m * r[1] * eps * T / r[0];
  out.final_bound = std::ldexp(eps, -m);
  return out;
}

}  // namespace neklab
