#include "neklab/hamiltonian.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace neklab {

std::vector<double> PhasePoint::flat() const {
  std::vector<double> v(z);
  v.insert(v.end(), zeta.begin(), zeta.end());
  return v;
}

PhasePoint PhasePoint::from_flat(Ambient amb, const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != amb.nvars()) throw DimensionError("from_flat: size mismatch");
  PhasePoint pt;
  pt.z.assign(v.begin(), v.begin() + 2 * amb.n);
  pt.zeta.assign(v.begin() + 2 * amb.n, v.end());
  return pt;
}

double PhasePoint::norm_z() const {
  double s = 0.0;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

double PhasePoint::norm_zeta() const {
  double s = 0.0;
  for (double v : zeta) s += v * v;
  return std::sqrt(s);
}

double evaluate(const Polynomial& p, const PhasePoint& pt) {
  if (!(pt.ambient() == p.ambient()) || pt.z.size() % 2 || pt.zeta.size() % 2) {
    throw DimensionError("evaluate: phase point does not match polynomial ambient");
  }
  return evaluate(p, std::span<const double>(pt.flat()));
}

ActionVector actions(const PhasePoint& pt) {
  const std::size_t n = pt.z.size() / 2;
  ActionVector I(n);
  for (std::size_t j = 0; j < n; ++j) I[j] = 0.5 * (pt.z[j] * pt.z[j] + pt.z[n + j] * pt.z[n + j]);
  return I;
}

double action_distance(const ActionVector& I, const ActionVector& J) {
  if (I.size() != J.size()) throw DimensionError("action_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t j = 0; j < I.size(); ++j) d += std::abs(I[j] - J[j]);
  return d;
}

double l1_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double linf_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

void SystemSpec::validate() const {
  if (n < 1 || N < 0) throw DimensionError("system: n must be >= 1 and N >= 0");
  if (static_cast<int>(alpha.size()) != n) throw DimensionError("system: alpha must have length n");
  if (A.rows() != n || A.cols() != n) throw DimensionError("system: A must be n x n");
  if (static_cast<int>(I0.size()) != n) throw DimensionError("system: I0 must have length n");
  const Ambient amb = ambient();
  for (const Polynomial* p : {&f, &f_kappa, &Lambda}) {
    if (!(p->ambient() == amb)) throw DimensionError("system: polynomial ambient does not match (n, N)");
  }
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw PreconditionError("system: A must be symmetric");
  if (Lambda.depends_on_z()) throw PreconditionError("system: Lambda must depend on zeta only");
  if (!(kappa >= 0.0)) throw PreconditionError("kappa must be ≥ 0");
}

Polynomial SystemSpec::perturbation() const { return f + f_kappa * kappa; }

Polynomial integrable_part(const SystemSpec& spec) {
  const Ambient amb = spec.ambient();
  Polynomial h(amb);
  std::vector<Polynomial> I;
  for (int j = 0; j < spec.n; ++j) I.push_back(Polynomial::action(amb, j));
  for (int j = 0; j < spec.n; ++j) h += I[j] * spec.alpha[j];
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      if (spec.A(i, j) != 0.0) h += (I[i] * I[j]) * (0.5 * spec.A(i, j));
    }
  }
  return h;
}

Polynomial total_hamiltonian(const SystemSpec& spec) {
  return integrable_part(spec) + spec.perturbation() + spec.Lambda * spec.kappa;
}

double hamiltonian_value(const SystemSpec& spec, const PhasePoint& pt) {
  const ActionVector I = actions(pt);
  double lin = 0.0, quad = 0.0;
  for (int i = 0; i < spec.n; ++i) {
    lin += spec.alpha[i] * I[i];
    for (int j = 0; j < spec.n; ++j) quad += spec.A(i, j) * I[i] * I[j];
  }
  const std::vector<double> x = pt.flat();
  double pert = evaluate(spec.f, std::span<const double>(x));
  if (spec.kappa != 0.0) {
    pert += spec.kappa * evaluate(spec.f_kappa, std::span<const double>(x));
    pert += spec.kappa * evaluate(spec.Lambda, std::span<const double>(x));
  }
  return lin + 0.5 * quad + pert;
}

std::vector<double> vector_field(const Polynomial& H, const PhasePoint& pt) {
  const Ambient amb = H.ambient();
  if (!(pt.ambient() == amb)) throw DimensionError("vector_field: ambient mismatch");
  const std::vector<double> x = pt.flat();
  std::vector<double> out(amb.nvars());
  for (int j = 0; j < amb.n; ++j) {
    out[amb.x(j)] = evaluate(derivative(H, amb.y(j)), std::span<const double>(x));
    out[amb.y(j)] = -evaluate(derivative(H, amb.x(j)), std::span<const double>(x));
  }
  for (int k = 0; k < amb.N; ++k) {
    out[amb.xi(k)] = evaluate(derivative(H, amb.eta(k)), std::span<const double>(x));
    out[amb.eta(k)] = -evaluate(derivative(H, amb.xi(k)), std::span<const double>(x));
  }
  return out;
}

std::vector<double> vector_field(const SystemSpec& spec, const PhasePoint& pt) {
  return vector_field(total_hamiltonian(spec), pt);
}

bool HypothesisReport::passed() const {
  for (const auto& it : items)
    if (!it.passed) return false;
  return true;
}

const HypothesisItem* HypothesisReport::find(const std::string& name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}

namespace {

// Point drawn uniformly in direction and radius-fraction inside a ball of radius r.
std::vector<double> sample_ball(std::mt19937_64& rng, int dim, double r) {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> v(dim);
  double s = 0.0;
  for (double& c : v) {
    c = gauss(rng);
    s += c * c;
  }
  const double scale = s > 0 ? r * unif(rng) / std::sqrt(s) : 0.0;
  for (double& c : v) c *= scale;
  return v;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

// If Lambda is a homogeneous quadratic form 1/2 zeta^T Q zeta, returns Q.
bool quadratic_form(const Polynomial& Lambda, int n, int N, Eigen::MatrixXd& Q) {
  Q = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  for (const auto& [e, c] : Lambda.terms()) {
    std::vector<int> vars;
    int deg = 0;
    for (int v = 2 * n; v < static_cast<int>(e.size()); ++v) {
      deg += e[v];
      for (int k = 0; k < e[v]; ++k) vars.push_back(v - 2 * n);
    }
    if (deg != 2) return false;
    if (vars[0] == vars[1]) {
      Q(vars[0], vars[0]) += 2.0 * c;
    } else {
      Q(vars[0], vars[1]) += c;
      Q(vars[1], vars[0]) += c;
    }
  }
  return true;
}

std::string fmt_witness(const char* what, double lhs, double rhs) {
  std::ostringstream os;
  os.precision(10);
  os << what << ": lhs=" << lhs << " rhs=" << rhs;
  return os.str();
}

}  // namespace

HypothesisReport check_structural_hypotheses(const SystemSpec& spec, std::uint64_t seed, int samples) {
  spec.validate();
  HypothesisReport report;
  const Ambient amb = spec.ambient();
  std::mt19937_64 rng(seed);

  {
    HypothesisItem item{"symmetry", true, true, "A symmetric to 1e-12", {}};
    report.items.push_back(item);
  }

  // <A I, I> >= |I|_1^2 / M. Certificate: lambda_min(A) >= n / M.
  {
    HypothesisItem item{"convexity", true, false, "", {}};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.A);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= spec.n / spec.M) {
      item.certified = true;
      item.detail = fmt_witness("lambda_min(A) >= n/M certified", lmin, spec.n / spec.M);
    } else {
      // No certificate: look for a violation on non-negative action vectors.
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      item.detail = fmt_witness("not certified, sampling found no violation", lmin, spec.n / spec.M);
      for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd I(spec.n);
        for (int j = 0; j < spec.n; ++j) I[j] = unif(rng);
        const double lhs = I.dot(spec.A * I);
        const double rhs = std::pow(I.lpNorm<1>(), 2) / spec.M;
        if (lhs < rhs * (1 - 1e-12)) {
          item.passed = false;
          item.detail = fmt_witness("<AI,I> >= |I|_1^2/M violated", lhs, rhs);
          item.witness.assign(I.data(), I.data() + spec.n);
          break;
        }
      }
    }
    report.items.push_back(item);
  }

  // Lambda bounds: |zeta|^2/2 <= Lambda <= C_Lambda |zeta|^2/2 and |D Lambda| <= C_Lambda |zeta|.
  {
    HypothesisItem lower{"lambda_lower", true, false, "sampled", {}};
    HypothesisItem upper{"lambda_upper", true, false, "sampled", {}};
    HypothesisItem grad{"lambda_gradient", true, false, "sampled", {}};
    Eigen::MatrixXd Q;
    if (amb.N > 0 && quadratic_form(spec.Lambda, spec.n, spec.N, Q)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
      const double lo = es.eigenvalues().minCoeff();
      const double hi = es.eigenvalues().maxCoeff();
      lower.certified = upper.certified = grad.certified = true;
      lower.detail = fmt_witness("quadratic form: lambda_min(Q) >= 1", lo, 1.0);
      upper.detail = fmt_witness("quadratic form: lambda_max(Q) <= C_Lambda", hi, spec.C_Lambda);
      grad.detail = fmt_witness("quadratic form: |Q| <= C_Lambda", std::max(std::abs(lo), std::abs(hi)),
                                spec.C_Lambda);
      const double tol = 1e-12 * std::max(1.0, spec.C_Lambda);
      if (lo < 1.0 - tol) {
        lower.passed = false;
        Eigen::VectorXd v = es.eigenvectors().col(0);
        lower.witness.assign(2 * spec.n, 0.0);
        lower.witness.insert(lower.witness.end(), v.data(), v.data() + v.size());
      }
      if (hi > spec.C_Lambda + tol) {
        upper.passed = false;
        Eigen::VectorXd v = es.eigenvectors().col(2 * spec.N - 1);
        upper.witness.assign(2 * spec.n, 0.0);
        upper.witness.insert(upper.witness.end(), v.data(), v.data() + v.size());
      }
      if (std::max(std::abs(lo), std::abs(hi)) > spec.C_Lambda + tol) {
        grad.passed = false;
        grad.witness = std::abs(lo) > std::abs(hi) ? lower.witness : upper.witness;
        if (grad.witness.empty()) {
          Eigen::VectorXd v = es.eigenvectors().col(std::abs(lo) > std::abs(hi) ? 0 : 2 * spec.N - 1);
          grad.witness.assign(2 * spec.n, 0.0);
          grad.witness.insert(grad.witness.end(), v.data(), v.data() + v.size());
        }
      }
    } else if (amb.N > 0) {
      std::vector<Polynomial> dL;
      for (int k = 0; k < 2 * spec.N; ++k) dL.push_back(derivative(spec.Lambda, 2 * spec.n + k));
      for (int s = 0; s < samples; ++s) {
        std::vector<double> zeta = sample_ball(rng, 2 * spec.N, spec.sample_radius_zeta);
        std::vector<double> x(2 * spec.n, 0.0);
        x.insert(x.end(), zeta.begin(), zeta.end());
        const double L = evaluate(spec.Lambda, std::span<const double>(x));
        const double r2 = std::pow(norm2(zeta), 2);
        const double tol = 1e-12 * std::max(r2, 1e-300);
        if (lower.passed && L < r2 / 2 - tol) {
          lower.passed = false;
          lower.detail = fmt_witness("Lambda >= |zeta|^2/2 violated", L, r2 / 2);
          lower.witness = x;
        }
        if (upper.passed && L > spec.C_Lambda * r2 / 2 + tol) {
          upper.passed = false;
          upper.detail = fmt_witness("Lambda <= C_Lambda |zeta|^2/2 violated", L, spec.C_Lambda * r2 / 2);
          upper.witness = x;
        }
        double g2 = 0.0;
        for (const auto& d : dL) g2 += std::pow(evaluate(d, std::span<const double>(x)), 2);
        if (grad.passed && std::sqrt(g2) > spec.C_Lambda * std::sqrt(r2) * (1 + 1e-12)) {
          grad.passed = false;
          grad.detail = fmt_witness("|D Lambda| <= C_Lambda |zeta| violated", std::sqrt(g2),
                                    spec.C_Lambda * std::sqrt(r2));
          grad.witness = x;
        }
      }
    } else {
      lower.detail = upper.detail = grad.detail = "no transverse variables";
      lower.certified = upper.certified = grad.certified = true;
    }
    report.items.push_back(lower);
    report.items.push_back(upper);
    report.items.push_back(grad);
  }

  // |f_kappa| <= C0 (|z|^5 + |zeta|^2 |z|^4 + kappa |zeta|^2 |z|), sampled on the configured balls.
  {
    HypothesisItem item{"perturbation_growth", true, false, "sampled", {}};
    const Polynomial fk = spec.perturbation();
    for (int s = 0; s < samples && !fk.is_zero(); ++s) {
      std::vector<double> z = sample_ball(rng, 2 * spec.n, spec.sample_radius_z);
      std::vector<double> zeta = sample_ball(rng, 2 * spec.N, spec.sample_radius_zeta);
      const double rz = norm2(z), rzeta = norm2(zeta);
      std::vector<double> x = z;
      x.insert(x.end(), zeta.begin(), zeta.end());
      const double lhs = std::abs(evaluate(fk, std::span<const double>(x)));
      const double rhs = spec.C0 * (std::pow(rz, 5) + rzeta * rzeta * std::pow(rz, 4) +
                                    spec.kappa * rzeta * rzeta * rz);
      if (lhs > rhs * (1 + 1e-12) + 1e-300) {
        item.passed = false;
        item.detail = fmt_witness("|f_kappa| <= C0(...) violated", lhs, rhs);
        item.witness = x;
        break;
      }
    }
    report.items.push_back(item);
  }
  return report;
}

}  // namespace neklab
