#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "neklab/conditions.hpp"
#include "neklab/hamiltonian.hpp"

namespace neklab {

/// Reference system used by the studies: n = 2, alpha = (1, golden ratio), A = identity,
/// Lambda = |zeta|^2 / 2 and a quintic perturbation.
struct DeskOptions {
  int N = 1;
  /// Adds sum_k (xi_k^2 + eta_k^2)(0.1 x1^2 x2^2 + 0.05 y1^4) to f.
  bool coupling = true;
  /// Adds the kappa-scaled part f_kappa = 0.1 sum_k xi_k^2 x1.
  bool kappa_term = true;
  double kappa = 0.0;
};

SystemSpec desk_system(const DeskOptions& opt = {});

/// Inputs of parameter_recipe for a system: |A| is the l1 operator norm and
/// C_A = 2 pi |A^{-1}|_inf.
RecipeInputs recipe_inputs(const SystemSpec& spec, double theta, double a, double tau);

struct DriftBound {
  double theta = 0.0;
  double a = 0.0;
  double K = 0.0;
};

struct DriftReport {
  double theta = 0.0;
  double a = 0.0;
  double kappa = 0.0;
  int N = 0;
  double horizon = 0.0;
  double horizon_cap = 0.0;  // T_max in force when the horizon was chosen
  double dt = 0.0;
  double max_action_drift = 0.0;   // sup_t |I(t) - I(0)|_1
  double max_kappa_Lambda = 0.0;   // sup_t kappa Lambda(zeta(t))
  double bound_K_theta = 0.0;      // K theta^{2+a}
  double bound_kappa_Lambda = 0.0; // K theta^{4+2a}
  bool bound_passed = false;
  double max_relative_energy_error = 0.0;
  int phases = 1;
};

/// Integrates over [-horizon, horizon] and compares the drift with the bound.
/// Throws PreconditionError when the structural hypotheses fail.
DriftReport measure_drift(const SystemSpec& spec, const PhasePoint& init, double horizon, double dt,
                          const DriftBound& bound);

struct StudyOptions {
  std::uint64_t seed = 42;
  int phases = 8;
  /// Split of |I(0)|_1 = theta^2 over the actions; empty means equal parts.
  std::vector<double> action_fractions;
  /// kappa Lambda(0) as a fraction of C_E theta^{4+2an}.
  double kappa_lambda_fraction = 0.5;
  /// Step size; <= 0 selects default_dt for every grid point.
  double dt = 0.0;
  /// Worker threads; <= 0 means hardware concurrency.
  int workers = 0;
};

struct HorizonRule {
  enum class Kind { fixed, recipe };
  Kind kind = Kind::fixed;
  double value = 1e4;   // used by fixed
  double T_max = 1e5;   // cap for every rule
};

/// Horizon for a grid point: the fixed value or exp(k / theta^a), both capped at T_max.
double choose_horizon(const HorizonRule& rule, double k, double theta, double a);

/// Initial point with |I(0)|_1 = theta^2 and kappa Lambda(zeta(0)) = target.
/// Torus phases come from phase_seed and the zeta direction from zeta_seed.
PhasePoint scaled_initial_point(const SystemSpec& spec, double theta, const std::vector<double>& fractions,
                                double kappa_lambda_target, std::uint64_t phase_seed, std::uint64_t zeta_seed);

struct SmallKappaStudy {
  /// reports[b][i]: base b at theta_grid[i], max over the phase samples.
  std::vector<std::vector<DriftReport>> reports;
  std::vector<double> theta_grid;
  /// Least-squares slope of log drift against log theta, one per base.
  std::vector<double> drift_slopes;
  double fitted_drift_exponent = 0.0;  // min over bases
  /// max/min of the drift across bases at each theta.
  std::vector<double> n_uniformity_ratio;
  double K = 0.0;
  bool all_bounds_passed = false;
};

/// Per theta: kappa = theta^{2+2a(2n-1)}, |I(0)|_1 = theta^2, kappa Lambda(0) a fixed fraction of
/// C_E theta^{4+2an}; drift is the max over the phase samples. Bases typically differ only in N.
SmallKappaStudy smallkappa_scaling_study(const std::vector<SystemSpec>& bases, const std::vector<double>& theta_grid,
                                         double a, const HorizonRule& horizon, const StudyOptions& opt = {});

/// Variant with kappa below its maximum: f may depend on zeta only through kappa f_kappa.
/// Throws PreconditionError on a coupling-structure violation.
std::vector<DriftReport> variant_scaling_study(const SystemSpec& base, double theta, double a,
                                               const std::vector<double>& kappa_grid, const HorizonRule& horizon,
                                               const StudyOptions& opt = {});

struct ConvergenceReport {
  std::vector<double> kappa_grid;
  std::vector<double> dt;
  std::vector<double> sup_distance;      // max_t |z^k(t) - z(t)| + |zeta^k(t)|
  std::vector<double> sup_kappa_Lambda;  // max_t kappa Lambda(zeta^k(t))
  std::vector<double> max_zeta;          // max_t |zeta^k(t)|
  std::vector<double> max_relative_energy_error;
  double fitted_zeta_slope = 0.0;  // slope of log max|zeta| against log kappa
  bool distance_monotone = false;       // non-increasing within 5%
  bool kappa_lambda_monotone = false;   // non-increasing within 5%
  HypothesisReport hypotheses;
};

/// Strong-confinement limit: for each kappa, zeta(0) = zeta0 / sqrt(kappa) and z(0) fixed; the
/// reference orbit follows H restricted to zeta = 0 with the same step. dt <= 0 selects the
/// default step of each kappa.
ConvergenceReport constrained_limit_study(const SystemSpec& spec_template, const PhasePoint& init_template,
                                          const std::vector<double>& kappa_grid, double horizon, double dt,
                                          int workers = 0);

/// Runs job(i) for i in [0, count) on up to `workers` threads. Exceptions are rethrown
/// after all workers stop, the one with the lowest index first.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& job);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_drift_csv(std::ostream& os, const std::vector<DriftReport>& reports);
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

}  // namespace neklab
