#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "neklab/hamiltonian.hpp"
#include "neklab/polynomial.hpp"

namespace neklab {

/// Data of one averaging step or of the whole iteration.
struct AveragingContext {
  Ambient ambient;
  std::vector<double> omega0;  // T * omega0 in 2 pi Z^n
  double T = 0.0;
  std::vector<double> I0;
  Eigen::MatrixXd A;
  double kappa = 0.0;
  double C_Lambda = 1.0;
  std::array<double, 3> r{1.0, 1.0, 1.0};
  /// Shrinking of the domain in a single step. The iteration overrides it with r/m.
  std::array<double, 3> rho{0.5, 0.5, 0.5};
  int m = 1;
  /// 0 selects the default deg(f) + 2m.
  int degree_cap = 0;
};

/// Throws PreconditionError unless T * omega0 is within 1e-9 of 2 pi Z^n.
void require_periodic(const std::vector<double>& omega0, double T);

/// h = <omega0, I>.
Polynomial frequency_hamiltonian(Ambient amb, const std::vector<double>& omega0);
/// g0 = 1/2 <A (I - I0), I - I0>.
Polynomial twist_hamiltonian(Ambient amb, const Eigen::MatrixXd& A, const std::vector<double>& I0);

PhasePoint exact_flow_h(const PhasePoint& pt, const std::vector<double>& omega0, double t);

Polynomial resonant_average(const Polynomial& f, const std::vector<double>& omega0, double T);

struct QuadratureAverage {
  Polynomial average;
  int required_nodes = 0;
  bool nodes_sufficient = true;
  std::string warning;
};

/// Trapezoidal average of f along the flow of h with `nodes` equally spaced samples.
QuadratureAverage quadrature_average(const Polynomial& f, const std::vector<double>& omega0, double T, int nodes);

/// phi with {phi, h} = f - resonant_average(f).
Polynomial homological_generator(const Polynomial& f, const std::vector<double>& omega0, double T);

/// F o X_phi^1 via the Lie series sum_k ad_phi^k F / k!, ad_phi F = {F, phi}, truncated at degree_cap.
Polynomial lie_transform(const Polynomial& F, const Polynomial& phi, int degree_cap, int max_terms = 64);

struct StepReport {
  double epsilon = 0.0;  // majorant of f on (r2, r3)
  double delta = 0.0;    // majorant of g on (r2, r3)
  double rho_min = 0.0;  // min{rho1 / r2, rho2, rho3}
  double smallness_lhs = 0.0;  // epsilon T
  double smallness_rhs = 0.0;  // rho_min^2 / 9
  bool smallness_passed = false;
  double displacement_bound = 0.0;  // 3 epsilon T / rho_min
  double f_plus_bound = 0.0;
  double f_plus_norm = 0.0;  // majorant of f_plus on (r2 - rho2, r3 - rho3)
  double g_plus_norm = 0.0;
  int degree_cap = 0;
  std::array<double, 3> r{};
  std::array<double, 3> rho{};
};

struct StepResult {
  Polynomial phi;
  Polynomial g_plus;
  Polynomial f_plus;
  StepReport report;
};

/// One averaging step: f is split into its average (moved into g) and a remainder
/// of higher order produced by the time-one map of the generator.
StepResult one_step(const AveragingContext& ctx, const Polynomial& g, const Polynomial& f, const Polynomial& Lambda);

struct Condition {
  std::string name;
  std::string relation;  // "<" or "<="
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;
  double margin = 0.0;  // rhs - lhs
};

struct ConditionReport {
  std::string lemma;
  std::vector<Condition> items;
  bool passed() const;
  const Condition* find(const std::string& name) const;
};

struct NormalFormResult {
  std::vector<Polynomial> generators;
  Polynomial g_hat;
  Polynomial f_hat;
  /// norms[j] = majorant of f_j on the step-j radii (3r - j r / m); norms[0] = epsilon.
  std::vector<double> norms;
  std::vector<StepReport> steps;
  ConditionReport conditions;
  double epsilon = 0.0;
  double psi_displacement_bound = 0.0;
  double final_bound = 0.0;  // 2^{-m} epsilon
  int degree_cap = 0;
};

/// m averaging steps on the shrinking domains 3r - j r / m, starting from g = 0.
NormalFormResult iterate_normal_form(const AveragingContext& ctx, const Polynomial& f, const Polynomial& Lambda);

}  // namespace neklab
