#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "neklab/hamiltonian.hpp"

namespace neklab {

/// Every problem found while reading a configuration, in document order.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

enum class ExperimentType { dirichlet, normalform, drift, constrained, smallkappa, variant, check };

std::string experiment_name(ExperimentType t);
std::optional<ExperimentType> experiment_from_name(const std::string& name);

/// Either a preset ("desk") or a fully specified system ("custom").
struct SystemConfig {
  std::string preset = "desk";
  int n = 2;
  int N = 1;
  double kappa = 0.0;
  // radii of the sample ball used by the hypothesis checks
  double sample_radius_z = 1.0;
  double sample_radius_zeta = 1.0;
  // desk only
  bool coupling = true;
  bool kappa_term = true;
  // custom only
  std::vector<double> alpha;
  std::vector<std::vector<double>> A;
  std::vector<double> I0;
  std::string f = "0";
  std::string f_kappa = "0";
  std::string Lambda = "0";
  double M = 1.0;
  double C_Lambda = 1.0;
  double C0 = 1.0;

  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

/// Fields of all experiment kinds; only those of `type` are read and written.
struct ExperimentConfig {
  ExperimentType type = ExperimentType::dirichlet;
  // dirichlet
  std::vector<double> omega;
  std::int64_t Q = 0;
  // normalform, drift, smallkappa, variant, check
  double theta = 0.2;
  double a = 0.125;
  // normalform: split of |I_init|_1 = theta^2; empty means equal parts
  std::vector<double> action_fractions;
  // drift: empty z draws a seeded point with |I(0)|_1 = theta^2
  std::vector<double> z;
  std::vector<double> zeta;
  /// drift: kappa; absent means theta^{2+2a(2n-1)}
  std::optional<double> kappa;
  double kappa_lambda_fraction = 0.5;
  // constrained
  std::vector<double> kappa_grid{10, 100, 1000, 10000};
  std::vector<double> zeta0;
  // smallkappa
  std::vector<double> theta_grid{0.3, 0.2, 0.15, 0.1};
  std::vector<int> N_values{1, 4, 16};
  std::string horizon_rule = "fixed";
  // variant
  std::vector<double> kappa_fractions{1.0, 0.1, 0.01};
  // check: theta_auto selects the largest theta for which the recipe passes
  std::string lemma = "local_stability_small_kappa";
  bool theta_auto = false;
  double tau = 3.141592653589793;
  std::map<std::string, double> inputs;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct NumericConfig {
  double dt = 0.0;  // 0 selects the default step
  double horizon = 1e4;
  double T_max = 1e5;
  int degree_cap = 0;
  int nodes = 64;
  int phases = 8;

  friend bool operator==(const NumericConfig&, const NumericConfig&) = default;
};

struct OutputConfig {
  std::string directory = ".";
  std::string format = "csv";

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct RunConfig {
  SystemConfig system;
  ExperimentConfig experiment;
  NumericConfig numeric;
  OutputConfig output;
  std::uint64_t seed = 42;
  int workers = 0;  // 0 means available parallelism

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates JSON text. When the document has no experiment section the
/// experiment type is `fallback`; with one, its type must match `fallback` if given.
/// Throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text, std::optional<ExperimentType> fallback = std::nullopt);

/// Canonical JSON: sorted keys, defaults spelled out, only the fields of the experiment type.
std::string serialize_config(const RunConfig& cfg);

/// Builds the system. Throws ConfigError when polynomials or dimensions are inconsistent.
SystemSpec build_system(const SystemConfig& sys);
SystemSpec build_system(const SystemConfig& sys, int N);

}  // namespace neklab
