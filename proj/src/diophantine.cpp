#include "neklab/diophantine.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "neklab/polynomial.hpp"

namespace neklab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double linf_operator_norm(const Eigen::MatrixXd& A) { return A.cwiseAbs().rowwise().sum().maxCoeff(); }

double l1_operator_norm(const Eigen::MatrixXd& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); }

DirichletResult dirichlet_best(const std::vector<double>& omega, std::int64_t Q) {
  if (Q < 1) throw PreconditionError("dirichlet_best: Q must be >= 1");
  DirichletResult best;
  best.err = INFINITY;
  std::vector<std::int64_t> p(omega.size());
  for (std::int64_t q = 1; q <= Q; ++q) {
    double err = 0.0;
    for (std::size_t j = 0; j < omega.size(); ++j) {
      const double v = static_cast<double>(q) * omega[j];
      const double r = std::nearbyint(v);  // default rounding mode: ties to even
      p[j] = static_cast<std::int64_t>(r);
      err = std::max(err, std::abs(v - r));
    }
    if (err < best.err) {
      best.err = err;
      best.q = q;
      best.p = p;
    }
  }
  return best;
}

PeriodicFrequency periodic_frequency(const std::vector<double>& omega, std::int64_t Q) {
  const std::size_t n = omega.size();
  if (n == 0) throw DimensionError("periodic_frequency: empty frequency vector");
  std::size_t imax = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (std::abs(omega[j]) > std::abs(omega[imax])) imax = j;
  const double sign = omega[imax] < 0 ? -1.0 : 1.0;
  const double wn = sign * omega[imax];
  if (!(wn > 1.0)) throw PreconditionError("periodic_frequency: |omega|_inf must exceed 1");
  const double floor_wn = std::floor(wn);

  PeriodicFrequency out;
  out.omega0.assign(n, 0.0);
  if (n == 1) {
    // A single frequency is always periodic; take the period that matches [omega].
    out.T = kTwoPi * floor_wn / wn;
    out.omega0[0] = omega[0];
    out.dirichlet = {1, {static_cast<std::int64_t>(floor_wn)}, 0.0};
    return out;
  }

  std::vector<double> rescaled;
  std::vector<std::size_t> index;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == imax) continue;
    rescaled.push_back(sign * omega[j] * floor_wn / wn);
    index.push_back(j);
  }
  out.dirichlet = dirichlet_best(rescaled, Q);
  const double q = static_cast<double>(out.dirichlet.q);
  out.T = kTwoPi * q * floor_wn / wn;
  const double factor = wn / floor_wn;
  for (std::size_t k = 0; k < index.size(); ++k) {
    const double pk = static_cast<double>(out.dirichlet.p[k]);
    // An exactly resonant component is returned unchanged rather than re-rounded.
    out.omega0[index[k]] = q * rescaled[k] == pk ? omega[index[k]] : sign * factor * pk / q;
  }
  out.omega0[imax] = omega[imax];  // factor * [omega_n] = omega_n
  return out;
}

double periodic_orbit_threshold(const std::vector<double>& alpha, const Eigen::MatrixXd& A, double a) {
  const int n = static_cast<int>(alpha.size());
  double alpha_inf = 0.0;
  for (double v : alpha) alpha_inf = std::max(alpha_inf, std::abs(v));
  const double delta = alpha_inf / 2.0;
  const double amax = A.cwiseAbs().maxCoeff();
  // |Omega(I) - alpha|_inf <= max|A_ij| |I|_1 < delta / 2
  double theta0 = amax > 0 ? std::sqrt(delta / (2.0 * amax)) : INFINITY;
  theta0 = std::min(theta0, std::sqrt(alpha_inf / 4.0));
  if (n >= 2) theta0 = std::min(theta0, 1.0);  // theta^{a(n-1)} < 1
  theta0 = std::min(theta0, std::pow(delta / 4.0, 1.0 / (2.0 + a)));
  return theta0;
}

PeriodicApproximation approximate_periodic_orbit(const std::vector<double>& alpha, const Eigen::MatrixXd& A,
                                                 const std::vector<double>& I_init, double a) {
  const int n = static_cast<int>(alpha.size());
  if (A.rows() != n || A.cols() != n || static_cast<int>(I_init.size()) != n) {
    throw DimensionError("approximate_periodic_orbit: dimension mismatch");
  }
  if (!(a > 0)) throw PreconditionError("approximate_periodic_orbit: a must be positive");
  double theta2 = 0.0;
  for (double v : I_init) theta2 += std::abs(v);
  if (theta2 <= 0.0) throw PreconditionError("approximate_periodic_orbit: I_init must be non-zero");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw PreconditionError("approximate_periodic_orbit: A is singular");
  const Eigen::MatrixXd Ainv = lu.inverse();

  PeriodicApproximation out;
  out.theta = std::sqrt(theta2);
  out.C = kTwoPi * linf_operator_norm(Ainv);
  out.theta0 = periodic_orbit_threshold(alpha, A, a);
  out.below_threshold = out.theta < out.theta0;
  if (!out.below_threshold) {
    std::ostringstream msg;
    msg << "theta=" << out.theta << " is not below the smallness threshold theta0=" << out.theta0;
    out.warnings.push_back(msg.str());
  }

  Eigen::VectorXd I = Eigen::Map<const Eigen::VectorXd>(I_init.data(), n);
  Eigen::VectorXd al = Eigen::Map<const Eigen::VectorXd>(alpha.data(), n);
  Eigen::VectorXd omega_tilde = (al + A * I) / theta2;
  out.Q = static_cast<std::int64_t>(std::floor(std::pow(out.theta, -a * (n - 1)))) + 1;

  PeriodicFrequency pf = periodic_frequency(std::vector<double>(omega_tilde.data(), omega_tilde.data() + n), out.Q);
  out.tau = pf.T;
  out.T = pf.T / theta2;
  // omega - omega0 = theta^2 (omega~ - omega~0). Working with the difference keeps
  // omega0 = omega and I0 = I_init exact when no approximation was needed.
  Eigen::VectorXd gap(n);
  for (int j = 0; j < n; ++j) gap[j] = theta2 * (omega_tilde[j] - pf.omega0[j]);
  const Eigen::VectorXd omega = al + A * I;
  const Eigen::VectorXd diff = Ainv * gap;
  out.omega0.resize(n);
  out.I0.resize(n);
  for (int j = 0; j < n; ++j) {
    out.omega0[j] = omega[j] - gap[j];
    out.I0[j] = I[j] - diff[j];
  }
  return out;
}

}  // namespace neklab
