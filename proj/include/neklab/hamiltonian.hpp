#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "neklab/polynomial.hpp"

namespace neklab {

/// A real point (z, zeta). z = (x_1..x_n, y_1..y_n), zeta = (xi_1..xi_N, eta_1..eta_N).
struct PhasePoint {
  std::vector<double> z;
  std::vector<double> zeta;

  PhasePoint() = default;
  PhasePoint(Ambient amb) : z(2 * amb.n, 0.0), zeta(2 * amb.N, 0.0) {}
  PhasePoint(std::vector<double> z_, std::vector<double> zeta_) : z(std::move(z_)), zeta(std::move(zeta_)) {}

  Ambient ambient() const { return {static_cast<int>(z.size() / 2), static_cast<int>(zeta.size() / 2)}; }
  /// Concatenated coordinates in the global variable order.
  std::vector<double> flat() const;
  static PhasePoint from_flat(Ambient amb, const std::vector<double>& v);

  double norm_z() const;
  double norm_zeta() const;

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

double evaluate(const Polynomial& p, const PhasePoint& pt);

using ActionVector = std::vector<double>;

ActionVector actions(const PhasePoint& pt);
/// l1 distance between action vectors.
double action_distance(const ActionVector& I, const ActionVector& J);
double l1_norm(const std::vector<double>& v);
double linf_norm(const std::vector<double>& v);

/// H = <alpha, I> + 1/2 <A I, I> + f + kappa * f_kappa + kappa * Lambda.
///
/// f_kappa is the part of the perturbation that scales with kappa (for instance the
/// kappa |zeta|^2 |z| coupling); keeping it separate lets studies vary kappa.
struct SystemSpec {
  int n = 0;
  int N = 0;
  std::vector<double> alpha;
  Eigen::MatrixXd A;
  std::vector<double> I0;
  Polynomial f;
  Polynomial f_kappa;
  Polynomial Lambda;
  double kappa = 0.0;
  double M = 1.0;
  double C_Lambda = 1.0;
  double C0 = 1.0;
  double sample_radius_z = 1.0;
  double sample_radius_zeta = 1.0;

  Ambient ambient() const { return {n, N}; }
  /// Throws DimensionError / PreconditionError on inconsistent data.
  void validate() const;
  /// f + kappa * f_kappa.
  Polynomial perturbation() const;
};

/// <alpha, I> + 1/2 <A I, I> as a polynomial.
Polynomial integrable_part(const SystemSpec& spec);
Polynomial total_hamiltonian(const SystemSpec& spec);

double hamiltonian_value(const SystemSpec& spec, const PhasePoint& pt);
/// (dx/dt, dy/dt, dxi/dt, deta/dt) = (H_y, -H_x, H_eta, -H_xi), flat order.
std::vector<double> vector_field(const SystemSpec& spec, const PhasePoint& pt);
std::vector<double> vector_field(const Polynomial& H, const PhasePoint& pt);

struct HypothesisItem {
  std::string name;
  bool passed = true;
  bool certified = false;  // true when an exact certificate (not sampling) backs the verdict
  std::string detail;
  std::vector<double> witness;  // flat point where a violation was found
};

struct HypothesisReport {
  std::vector<HypothesisItem> items;
  bool passed() const;
  const HypothesisItem* find(const std::string& name) const;
};

HypothesisReport check_structural_hypotheses(const SystemSpec& spec, std::uint64_t seed = 42,
                                             int samples = 10000);

}  // namespace neklab
