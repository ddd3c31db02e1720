#include "neklab/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace neklab {

namespace {

std::vector<Polynomial> field_components(const Polynomial& H) {
  const Ambient amb = H.ambient();
  std::vector<Polynomial> comp(amb.nvars(), Polynomial(amb));
  for (int j = 0; j < amb.n; ++j) {
    comp[amb.x(j)] = derivative(H, amb.y(j));
    comp[amb.y(j)] = -derivative(H, amb.x(j));
  }
  for (int k = 0; k < amb.N; ++k) {
    comp[amb.xi(k)] = derivative(H, amb.eta(k));
    comp[amb.eta(k)] = -derivative(H, amb.xi(k));
  }
  return comp;
}

}  // namespace

HamiltonianFlow::HamiltonianFlow(const Polynomial& H)
    : amb_(H.ambient()),
      grad_(field_components(H), H.ambient().nvars()),
      g_(amb_.nvars()),
      mid_(amb_.nvars()),
      next_(amb_.nvars()),
      k_(amb_.nvars()) {}

void HamiltonianFlow::field(std::span<const double> x, std::span<double> out) const { grad_.evaluate(x, out); }

void HamiltonianFlow::step(std::vector<double>& x, double dt) const {
  const std::size_t d = x.size();
  if (static_cast<int>(d) != amb_.nvars()) throw DimensionError("step: state dimension mismatch");
  if (d == 0) return;
  field(x, k_);
  double scale = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    next_[i] = x[i] + dt * k_[i];
    scale = std::max(scale, std::abs(x[i]));
  }
  double residual = INFINITY;
  for (int it = 0; it < kMaxIterations; ++it) {
    for (std::size_t i = 0; i < d; ++i) mid_[i] = 0.5 * (x[i] + next_[i]);
    field(mid_, g_);
    residual = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double v = x[i] + dt * g_[i];
      residual = std::max(residual, std::abs(v - next_[i]));
      next_[i] = v;
    }
    if (residual <= kTolerance * scale) {
      x.swap(next_);
      return;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "implicit midpoint did not converge in %d iterations (residual %.3e)",
                kMaxIterations, residual);
  throw IntegrationError(buf, residual);
}

PhasePoint step(const Polynomial& H, const PhasePoint& pt, double dt) {
  HamiltonianFlow flow(H);
  std::vector<double> x = pt.flat();
  flow.step(x, dt);
  return PhasePoint::from_flat(H.ambient(), x);
}

PhasePoint step(const SystemSpec& spec, const PhasePoint& pt, double dt) { return step(total_hamiltonian(spec), pt, dt); }

double default_dt(const SystemSpec& spec) {
  double fastest = spec.kappa * spec.C_Lambda;
  for (double a : spec.alpha) fastest = std::max(fastest, std::abs(a));
  if (fastest <= 0.0) fastest = 1.0;
  return 2.0 * std::numbers::pi / fastest / 64.0;
}

std::vector<double> propagate(const HamiltonianFlow& flow, std::vector<double> x, double t_end, double dt,
                              const std::function<void(double, const std::vector<double>&)>& observe) {
  if (!(dt > 0.0)) throw PreconditionError("integrate: dt must be positive");
  if (observe) observe(0.0, x);
  if (t_end == 0.0) return x;
  // Uniform grid that ends exactly at t_end.
  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t_end) / dt - 1e-9)));
  const double h = t_end / static_cast<double>(steps);
  for (long s = 1; s <= steps; ++s) {
    flow.step(x, h);
    if (observe) observe(h * static_cast<double>(s), x);
  }
  return x;
}

Trajectory integrate(const SystemSpec& spec, const PhasePoint& pt, double t_end, double dt, int observe_every) {
  spec.validate();
  if (observe_every < 1) throw PreconditionError("integrate: observe_every must be >= 1");
  const Ambient amb = spec.ambient();
  HamiltonianFlow flow(total_hamiltonian(spec));
  Trajectory traj;
  traj.n = spec.n;
  auto& H = traj.observables["H"];
  std::vector<std::vector<double>*> I;
  for (int j = 0; j < spec.n; ++j) I.push_back(&traj.observables["I_" + std::to_string(j + 1)]);
  auto& kL = traj.observables["kappaLambda"];
  auto& nz = traj.observables["norm_z"];
  auto& nzeta = traj.observables["norm_zeta"];
  long counter = 0;
  propagate(flow, pt.flat(), t_end, dt, [&](double t, const std::vector<double>& x) {
    if (counter++ % observe_every != 0) return;
    PhasePoint p = PhasePoint::from_flat(amb, x);
    traj.times.push_back(t);
    H.push_back(hamiltonian_value(spec, p));
    const ActionVector act = actions(p);
    for (int j = 0; j < spec.n; ++j) I[j]->push_back(act[j]);
    kL.push_back(spec.kappa * evaluate(spec.Lambda, std::span<const double>(x)));
    nz.push_back(p.norm_z());
    nzeta.push_back(p.norm_zeta());
    traj.points.push_back(std::move(p));
  });
  return traj;
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "t,H";
  for (int j = 0; j < n; ++j) os << ",I_" << j + 1;
  os << ",kappaLambda,norm_z,norm_zeta\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t i = 0; i < times.size(); ++i) {
    put(times[i]);
    os << ',';
    put(observables.at("H")[i]);
    for (int j = 0; j < n; ++j) {
      os << ',';
      put(observables.at("I_" + std::to_string(j + 1))[i]);
    }
    for (const char* key : {"kappaLambda", "norm_z", "norm_zeta"}) {
      os << ',';
      put(observables.at(key)[i]);
    }
    os << '\n';
  }
}

PhasePoint time_one_map(const Polynomial& phi, const PhasePoint& pt, int steps) {
  HamiltonianFlow flow(phi);
  std::vector<double> x = pt.flat();
  const double h = 1.0 / steps;
  for (int s = 0; s < steps; ++s) flow.step(x, h);
  return PhasePoint::from_flat(phi.ambient(), x);
}

}  // namespace neklab
