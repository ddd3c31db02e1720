#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "neklab/hamiltonian.hpp"
#include "neklab/polynomial.hpp"

namespace neklab {

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Hamiltonian vector field of a polynomial, compiled for repeated evaluation.
/// Not thread-safe: give every trajectory its own instance.
class HamiltonianFlow {
 public:
  explicit HamiltonianFlow(const Polynomial& H);

  const Ambient& ambient() const { return amb_; }
  /// X_H at a flat point.
  void field(std::span<const double> x, std::span<double> out) const;
  /// One implicit midpoint step in place. dt may be negative (time reversal).
  void step(std::vector<double>& x, double dt) const;

  static constexpr double kTolerance = 1e-13;
  static constexpr int kMaxIterations = 50;

 private:
  Ambient amb_;
  CompiledPolynomials grad_;
  mutable std::vector<double> g_, mid_, next_, k_;
};

PhasePoint step(const SystemSpec& spec, const PhasePoint& pt, double dt);
PhasePoint step(const Polynomial& H, const PhasePoint& pt, double dt);

struct Trajectory {
  std::vector<double> times;
  std::vector<PhasePoint> points;
  /// "H", "I_1".."I_n", "kappaLambda", "norm_z", "norm_zeta".
  std::map<std::string, std::vector<double>> observables;
  int n = 0;

  void write_csv(std::ostream& os) const;
};

/// Default step: (2 pi / fastest linear frequency) / 64, with the fastest frequency
/// max(|alpha|_inf, kappa C_Lambda).
double default_dt(const SystemSpec& spec);

/// Integrates to t_end (negative t_end runs backwards) and records every observe_every-th step.
Trajectory integrate(const SystemSpec& spec, const PhasePoint& pt, double t_end, double dt, int observe_every = 1);

/// Streams the flow without storing it; the callback receives (t, flat state) after
/// every step including t = 0. Returns the final state.
std::vector<double> propagate(const HamiltonianFlow& flow, std::vector<double> x, double t_end, double dt,
                              const std::function<void(double, const std::vector<double>&)>& observe);

/// Time-one map of the flow of phi, computed with the integrator at dt = 1/1024.
PhasePoint time_one_map(const Polynomial& phi, const PhasePoint& pt, int steps = 1024);

}  // namespace neklab
