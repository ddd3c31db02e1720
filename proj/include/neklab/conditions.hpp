#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "neklab/normal_form.hpp"
#include "neklab/polynomial.hpp"

namespace neklab {

class SchemaError : public std::invalid_argument {
 public:
  SchemaError(const std::string& what, std::vector<std::string> missing)
      : std::invalid_argument(what), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

struct RecipeInputs {
  double theta = 0.0;
  double a = 0.0;
  int n = 0;
  double normA = 1.0;
  double C0 = 1.0;
  double M = 1.0;
  double C_Lambda = 1.0;
  /// Bound for the inverse of I -> alpha + A I; 2 pi ||A^{-1}||_inf for linear frequency maps.
  double C_A = 1.0;
  double tau = 0.0;
};

struct RecipeConstants {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0;
  double L = 0.0, P = 0.0, delta = 0.0, C1 = 0.0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  double m_raw = 0.0;  // delta * [theta^{-a}]
  int m = 0;           // step count used in practice: max(1, floor(m_raw))
  double T = 0.0, epsilon = 0.0;
  double K = 0.0, k = 0.0, C_E = 0.0;
  double kappa = 0.0;  // theta^{2 + 2a(2n-1)}
};

/// Upper end of the admissible interval for a: min{1/(4(n-1)), 1/(1+3n)}.
double admissible_a_bound(int n);
RecipeConstants parameter_recipe(const RecipeInputs& in);
/// r3 for the small-kappa variant: P theta^{2+a} / sqrt(kappa).
double variant_r3(double P, double theta, double a, double kappa);

struct Exponents4 {
  double p1, q1, p2, q2;
};
Exponents4 exponents_from_a(double a, int n);

enum class Lemma {
  iteration_step,                // averaging step smallness
  normal_form,                   // m-fold iteration
  local_stability_large_kappa,   // stability near a periodic orbit, kappa large
  local_stability_small_kappa,   // stability near a periodic orbit, kappa small
  quantitative_large_kappa,      // conditions on the initial data, kappa large
  small_kappa_theorem,           // theta scaling with kappa fixed by theta
  variant_theorem,               // theta scaling with kappa up to its maximum
};

std::string lemma_name(Lemma l);
Lemma lemma_from_name(const std::string& name);

using ConditionInputs = std::map<std::string, double>;

/// Evaluates every inequality of the selected condition set. Throws SchemaError listing
/// all absent inputs. For quantitative_large_kappa, J and Lambda (if supplied) are
/// additionally checked to Poisson-commute.
ConditionReport check_conditions(Lemma lemma, const ConditionInputs& inputs, const std::vector<Polynomial>& J = {},
                                 const Polynomial* Lambda = nullptr);

/// Inputs for the local_stability_small_kappa set derived from the recipe at the given theta,
/// with worst-case initial data allowed by the construction and tau as supplied.
ConditionInputs small_kappa_inputs(const RecipeInputs& in, const RecipeConstants& rc);

/// Largest theta (scanned on a log grid, then bisected) such that the small-kappa
/// condition set holds for every theta below it down to 1e-50 on the grid, with tau
/// ranging over its whole admissible interval.
double recipe_threshold_theta(RecipeInputs in);

}  // namespace neklab
