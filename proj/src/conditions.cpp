#include "neklab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace neklab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRoundingSlack = 1e-12;

class Evaluator {
 public:
  Evaluator(Lemma lemma, const ConditionInputs& in) : in_(in) { report_.lemma = lemma_name(lemma); }

  void require(std::initializer_list<const char*> names) {
    std::vector<std::string> missing;
    for (const char* n : names)
      if (!in_.count(n)) missing.emplace_back(n);
    if (!missing.empty()) {
      std::string msg = "check_conditions(" + report_.lemma + "): missing inputs:";
      for (const auto& m : missing) msg += " " + m;
      throw SchemaError(msg, missing);
    }
  }

  double operator[](const char* name) const { return in_.at(name); }

  void less(std::string name, double lhs, double rhs) { push(std::move(name), "<", lhs, rhs, lhs < rhs); }
  // Several recipe choices meet non-strict inequalities with equality; allow for rounding.
  void less_equal(std::string name, double lhs, double rhs) {
    push(std::move(name), "<=", lhs, rhs, lhs <= rhs + kRoundingSlack * std::abs(rhs));
  }
  void equal(std::string name, double lhs, double rhs, double rel_tol) {
    push(std::move(name), "=", lhs, rhs, std::abs(lhs - rhs) <= rel_tol * std::abs(rhs));
  }

  ConditionReport take() { return std::move(report_); }

 private:
  void push(std::string name, std::string rel, double lhs, double rhs, bool ok) {
    report_.items.push_back({std::move(name), std::move(rel), lhs, rhs, ok, rhs - lhs});
  }

  const ConditionInputs& in_;
  ConditionReport report_;
};

double l1_small(double M, double normA) { return std::min(0.25, 1.0 / (20.0 * std::sqrt(M * normA))); }
double l2_small(double M, double normA) { return std::min(1.0 / 3888.0, 1.0 / (480.0 * std::sqrt(M * normA))); }

}  // namespace

double admissible_a_bound(int n) {
  if (n < 1) throw PreconditionError("n must be >= 1");
  const double b = 1.0 / (1.0 + 3.0 * n);
  return n == 1 ? b : std::min(1.0 / (4.0 * (n - 1)), b);
}

RecipeConstants parameter_recipe(const RecipeInputs& in) {
  if (!(in.a > 0.0 && in.a < admissible_a_bound(in.n))) {
    throw PreconditionError("parameter_recipe: a must lie in (0, " + std::to_string(admissible_a_bound(in.n)) + ")");
  }
  if (!(in.theta > 0.0 && in.theta < 1.0)) throw PreconditionError("parameter_recipe: theta must lie in (0, 1)");
  if (!(in.tau >= kPi)) throw PreconditionError("parameter_recipe: tau must be >= pi");
  if (!(in.M > 0 && in.normA > 0 && in.C_Lambda > 0 && in.C_A > 0 && in.C0 >= 0)) {
    throw PreconditionError("parameter_recipe: constants must be positive");
  }
  RecipeConstants rc;
  const double th = in.theta, a = in.a;
  const int n = in.n;
  rc.l0 = 1.0 / 2200.0;
  rc.l1 = l1_small(in.M, in.normA);
  rc.l2 = l2_small(in.M, in.normA);
  rc.L = n * in.C_A / rc.l1;
  rc.P = rc.L / (2.0 * kPi * std::sqrt(in.M));
  rc.delta = std::min(1.0 / (324.0 * in.normA * rc.L), rc.L / (6912.0 * kPi * kPi * in.C_Lambda * rc.P));
  const double P2 = rc.P * rc.P;
  rc.C1 = (std::pow(24.0, 5) + std::pow(24.0, 4) * P2 + 24.0 * P2) * in.C0;
  rc.epsilon = rc.C1 * std::pow(th, 5);
  rc.r2 = 8.0 * th;
  rc.r1 = rc.L * std::pow(th, 2.0 + a) / in.tau;
  rc.r3 = rc.P * std::pow(th, 1.0 + 2.0 * a * (1 - n));
  rc.T = in.tau / (th * th);
  rc.m_raw = rc.delta * std::floor(std::pow(th, -a));
  rc.m = std::max(1, static_cast<int>(std::min(std::floor(rc.m_raw), 1e9)));
  rc.K = std::max(2.0 * rc.L / kPi, rc.L * rc.L / (16.0 * in.M * kPi * kPi));
  rc.C_E = rc.L * rc.L / (std::pow(4.0 * kPi, 2) * 200.0 * in.M);
  rc.k = 0.5 * std::numbers::ln2 * rc.delta;
  rc.kappa = std::pow(th, 2.0 + 2.0 * a * (2 * n - 1));
  return rc;
}

double variant_r3(double P, double theta, double a, double kappa) {
  if (!(kappa > 0)) throw PreconditionError("variant_r3: kappa must be positive");
  return P * std::pow(theta, 2.0 + a) / std::sqrt(kappa);
}

Exponents4 exponents_from_a(double a, int n) {
  if (!(a >= 0.0 && a < admissible_a_bound(n))) throw PreconditionError("exponents_from_a: a out of range");
  const double d = 2.0 + 2.0 * a * (2 * n - 1);
  Exponents4 e{2.0 / d, (4.0 + 2.0 * a * n) / d, (2.0 + a) / d, a / d};
  // Written as a difference so that q2 = p2 - p1 holds in floating point as well.
  e.q2 = e.p2 - e.p1;
  return e;
}

std::string lemma_name(Lemma l) {
  switch (l) {
    case Lemma::iteration_step: return "iteration_step";
    case Lemma::normal_form: return "normal_form";
    case Lemma::local_stability_large_kappa: return "local_stability_large_kappa";
    case Lemma::local_stability_small_kappa: return "local_stability_small_kappa";
    case Lemma::quantitative_large_kappa: return "quantitative_large_kappa";
    case Lemma::small_kappa_theorem: return "small_kappa_theorem";
    case Lemma::variant_theorem: return "variant_theorem";
  }
  return "unknown";
}

Lemma lemma_from_name(const std::string& name) {
  for (Lemma l : {Lemma::iteration_step, Lemma::normal_form, Lemma::local_stability_large_kappa,
                  Lemma::local_stability_small_kappa, Lemma::quantitative_large_kappa, Lemma::small_kappa_theorem,
                  Lemma::variant_theorem}) {
    if (lemma_name(l) == name) return l;
  }
  throw SchemaError("unknown condition set '" + name + "'", {});
}

ConditionReport check_conditions(Lemma lemma, const ConditionInputs& in, const std::vector<Polynomial>& J,
                                 const Polynomial* Lambda) {
  Evaluator ev(lemma, in);
  switch (lemma) {
    case Lemma::iteration_step: {
      ev.require({"eps", "T", "r2", "rho1", "rho2", "rho3"});
      const double mn = std::min({ev["rho1"] / ev["r2"], ev["rho2"], ev["rho3"]});
      ev.less("eps T < min{rho1/r2, rho2, rho3}^2 / 9", ev["eps"] * ev["T"], mn * mn / 9.0);
      break;
    }
    case Lemma::normal_form: {
      ev.require({"r1", "r2", "r3", "m", "eps", "delta", "T", "normA", "kappa", "C_Lambda"});
      const double r1 = ev["r1"], r2 = ev["r2"], r3 = ev["r3"], m = ev["m"], eps = ev["eps"], T = ev["T"];
      ev.less("r1 < 2 r2^2", r1, 2 * r2 * r2);
      ev.less("r1 < 2 r2 r3", r1, 2 * r2 * r3);
      ev.less("m^2 eps T < r1^2/(81 r2^2)", m * m * eps * T, r1 * r1 / (81 * r2 * r2));
      ev.less_equal("54 m |A| r1 T + 324 (delta + 2 eps) m^2 r2^2 T / r1^2 + 9 kappa C_Lambda m T / 2 <= 1/2",
                    54 * m * ev["normA"] * r1 * T + 324 * (ev["delta"] + 2 * eps) * m * m * r2 * r2 * T / (r1 * r1) +
                        4.5 * ev["kappa"] * ev["C_Lambda"] * m * T,
                    0.5);
      break;
    }
    case Lemma::local_stability_large_kappa: {
      ev.require({"r1", "r2", "eps", "M", "I0_norm", "m", "normA", "T", "kappaLambda0", "I_dist0", "t_star",
                  "omega0_norm", "kappa", "Lambda_max", "c2"});
      const double r1 = ev["r1"], r2 = ev["r2"], eps = ev["eps"], M = ev["M"], m = ev["m"], T = ev["T"];
      const double l1 = std::min(0.25, 1.0 / (5.0 * std::sqrt(M * ev["normA"])));
      const double l2 = std::min(1.0 / 2592.0, 1.0 / (120.0 * std::sqrt(M * ev["normA"])));
      ev.less("r1 < r2^2/4", r1, r2 * r2 / 4);
      ev.less("eps M < r1^2/2200", eps * M, r1 * r1 / 2200);
      ev.less("|I0| < r2^2/16", ev["I0_norm"], r2 * r2 / 16);
      ev.less_equal("54 m |A| r1 T <= 1/4", 54 * m * ev["normA"] * r1 * T, 0.25);
      ev.less("m^2 eps T < l2 r1^2/r2^2", m * m * eps * T, l2 * r1 * r1 / (r2 * r2));
      ev.less_equal("kappa Lambda(0) <= r1^2/(360 M)", ev["kappaLambda0"], r1 * r1 / (360 * M));
      ev.less_equal("|I(0) - I0| <= l1 r1", ev["I_dist0"], l1 * r1);
      ev.less_equal("t* <= 3 2^m r1/(50 |omega0| r2^2)", ev["t_star"],
                    3 * std::exp2(m) * r1 / (50 * ev["omega0_norm"] * r2 * r2));
      ev.less_equal("t* kappa max Lambda <= 8 eps/(5 r2 c2 |omega0|)", ev["t_star"] * ev["kappa"] * ev["Lambda_max"],
                    8 * eps / (5 * r2 * ev["c2"] * ev["omega0_norm"]));
      break;
    }
    case Lemma::local_stability_small_kappa: {
      ev.require({"r1", "r2", "r3", "eps", "M", "I0_norm", "kappa", "m", "normA", "T", "C_Lambda", "I_dist0",
                  "kappaLambda0"});
      const double r1 = ev["r1"], r2 = ev["r2"], r3 = ev["r3"], eps = ev["eps"], M = ev["M"], m = ev["m"],
                   T = ev["T"], kappa = ev["kappa"];
      const double l0 = 1.0 / 2200.0, l1 = l1_small(M, ev["normA"]), l2 = l2_small(M, ev["normA"]);
      ev.less("r1 < r2^2/4", r1, r2 * r2 / 4);
      ev.less("r1 < 2 r2 r3", r1, 2 * r2 * r3);
      ev.less("eps M < l0 r1^2", eps * M, l0 * r1 * r1);
      ev.less("|I0| < r2^2/16", ev["I0_norm"], r2 * r2 / 16);
      ev.less_equal("r1^2 <= 4 kappa M r3^2", r1 * r1, 4 * kappa * M * r3 * r3);
      ev.less_equal("54 m |A| r1 T <= 1/6", 54 * m * ev["normA"] * r1 * T, 1.0 / 6.0);
      ev.less("m^2 eps T < l2 r1^2/r2^2", m * m * eps * T, l2 * r1 * r1 / (r2 * r2));
      ev.less_equal("C_Lambda kappa m T <= r1/(54 r2 r3)", ev["C_Lambda"] * kappa * m * T, r1 / (54 * r2 * r3));
      ev.less_equal("|I(0) - I0| <= l1 r1", ev["I_dist0"], l1 * r1);
      ev.less_equal("kappa Lambda(0) <= r1^2/(200 M)", ev["kappaLambda0"], r1 * r1 / (200 * M));
      break;
    }
    case Lemma::quantitative_large_kappa: {
      ev.require({"theta", "a", "n", "kappa", "k", "J_sum", "kappaLambda0", "L", "M"});
      const double th = ev["theta"], a = ev["a"], n = ev["n"];
      ev.less_equal("sum |J_k(zeta(0))| <= theta^4 exp(-k/theta^a)/kappa", ev["J_sum"],
                    std::pow(th, 4) * std::exp(-ev["k"] / std::pow(th, a)) / ev["kappa"]);
      ev.less_equal("kappa Lambda(0) <= L^2 theta^{4+2an}/((4 pi)^2 360 M)", ev["kappaLambda0"],
                    ev["L"] * ev["L"] * std::pow(th, 4 + 2 * a * n) / (std::pow(4 * kPi, 2) * 360 * ev["M"]));
      if (Lambda) {
        for (std::size_t k = 0; k < J.size(); ++k) {
          const double terms = static_cast<double>(poisson_bracket(J[k], *Lambda).size());
          ev.less_equal("{J_" + std::to_string(k + 1) + ", Lambda} = 0 (nonzero terms)", terms, 0.0);
        }
      }
      break;
    }
    case Lemma::small_kappa_theorem:
    case Lemma::variant_theorem: {
      ev.require({"theta", "a", "n", "I_norm0", "kappaLambda0", "C_E", "kappa"});
      const double th = ev["theta"], a = ev["a"];
      const int n = static_cast<int>(ev["n"]);
      const double kmax = std::pow(th, 2 + 2 * a * (2 * n - 1));
      ev.less("0 < a", 0.0, a);
      ev.less("a < min{1/(4(n-1)), 1/(1+3n)}", a, admissible_a_bound(n));
      ev.less_equal("|I(0)| <= theta^2", ev["I_norm0"], th * th);
      ev.less_equal("kappa Lambda(0) <= C_E theta^{4+2an}", ev["kappaLambda0"], ev["C_E"] * std::pow(th, 4 + 2 * a * n));
      if (lemma == Lemma::small_kappa_theorem) {
        ev.equal("kappa = theta^{2+2a(2n-1)}", ev["kappa"], kmax, 1e-12);
      } else {
        ev.less("0 < kappa", 0.0, ev["kappa"]);
        ev.less_equal("kappa <= theta^{2+2a(2n-1)}", ev["kappa"], kmax * (1 + 1e-12));
      }
      break;
    }
  }
  return ev.take();
}

ConditionInputs small_kappa_inputs(const RecipeInputs& in, const RecipeConstants& rc) {
  const double th = in.theta, a = in.a;
  const double approx = in.n * in.C_A * std::pow(th, 2 + a) / in.tau;  // l1 bound on |I(0) - I0|
  return {
      {"r1", rc.r1},
      {"r2", rc.r2},
      {"r3", rc.r3},
      {"eps", rc.epsilon},
      {"M", in.M},
      {"I0_norm", th * th + approx},
      {"kappa", rc.kappa},
      {"m", static_cast<double>(rc.m)},
      {"normA", in.normA},
      {"T", rc.T},
      {"C_Lambda", in.C_Lambda},
      {"I_dist0", approx},
      {"kappaLambda0", rc.C_E * std::pow(th, 4 + 2 * a * in.n)},
  };
}

namespace {

bool small_kappa_set_holds(RecipeInputs in) {
  const double taus[] = {kPi, 4 * kPi * std::pow(in.theta, -in.a * (in.n - 1))};
  for (double tau : taus) {
    in.tau = std::max(tau, kPi);
    const RecipeConstants rc = parameter_recipe(in);
    if (!check_conditions(Lemma::local_stability_small_kappa, small_kappa_inputs(in, rc)).passed()) return false;
  }
  return true;
}

}  // namespace

double recipe_threshold_theta(RecipeInputs in) {
  // Log grid from 1e-50 upwards; the threshold is the top of the initial passing run.
  constexpr int kPerDecade = 20;
  constexpr int kDecades = 50;
  double last_pass = 0.0, first_fail = 0.0;
  for (int i = kDecades * kPerDecade; i >= 1; --i) {
    in.theta = std::pow(10.0, -static_cast<double>(i) / kPerDecade);
    if (small_kappa_set_holds(in)) {
      last_pass = in.theta;
    } else {
      first_fail = in.theta;
      break;
    }
  }
  if (last_pass == 0.0) return 0.0;
  if (first_fail == 0.0) return last_pass;
  double lo = last_pass, hi = first_fail;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    in.theta = mid;
    (small_kappa_set_holds(in) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace neklab
