#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace neklab {

struct DirichletResult {
  std::int64_t q = 0;
  std::vector<std::int64_t> p;
  double err = 0.0;  // |q omega - p|_inf
};

/// Best simultaneous approximation with denominator q in 1..Q, p by nearest-integer
/// rounding (ties to even). On equal error the smallest q wins.
DirichletResult dirichlet_best(const std::vector<double>& omega, std::int64_t Q);

struct PeriodicFrequency {
  std::vector<double> omega0;
  double T = 0.0;
  DirichletResult dirichlet;
};

/// Fully resonant omega0 near omega with T omega0 in 2 pi Z^n. Needs |omega|_inf > 1.
/// For n = 1 the single frequency is rounded to the nearest integer multiple of 2 pi / T
/// with T = 2 pi Q / |omega|.
PeriodicFrequency periodic_frequency(const std::vector<double>& omega, std::int64_t Q);

struct PeriodicApproximation {
  std::vector<double> I0;
  double tau = 0.0;
  std::vector<double> omega0;
  double T = 0.0;
  double theta = 0.0;
  std::int64_t Q = 0;
  double C = 0.0;        // 2 pi ||A^{-1}||_inf
  double theta0 = 0.0;   // smallness threshold of the construction
  bool below_threshold = true;
  std::vector<std::string> warnings;
};

/// Approximates the frequency alpha + A I_init by a periodic one and returns the
/// matching reference actions I0 = A^{-1}(omega0 - alpha).
PeriodicApproximation approximate_periodic_orbit(const std::vector<double>& alpha, const Eigen::MatrixXd& A,
                                                 const std::vector<double>& I_init, double a);

/// Largest theta for which the construction's four smallness inequalities hold,
/// taking delta = |alpha|_inf / 2.
double periodic_orbit_threshold(const std::vector<double>& alpha, const Eigen::MatrixXd& A, double a);

/// |x|_inf operator norm (max absolute row sum).
double linf_operator_norm(const Eigen::MatrixXd& A);
/// |x|_1 operator norm (max absolute column sum).
double l1_operator_norm(const Eigen::MatrixXd& A);

}  // namespace neklab
