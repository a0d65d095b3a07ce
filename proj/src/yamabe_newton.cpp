#include "gby/yamabe_newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gby/error.hpp"
#include "gby/parallel.hpp"

namespace gby {

void SolverConfig::validate() const {
  detail::require(M >= 4, "solver needs M >= 4");
  detail::require(max_iter >= 0, "max_iter must be nonnegative");
  detail::require(tol_residual > 0.0 && tol_volume > 0.0, "tolerances must be positive");
  detail::require(fd_jacobian_step > 0.0, "Jacobian step must be positive");
  detail::require(damping > 0.0 && damping <= 1.0, "damping must lie in (0, 1]");
  detail::require(nodes >= 0, "node count must be nonnegative");
  detail::require(pinv_cutoff > 0.0 && pinv_cutoff < 1.0, "pseudo-inverse cutoff must lie in (0, 1)");
}

std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Converged: return "Converged";
    case SolverStatus::MaxIterations: return "MaxIterations";
    case SolverStatus::SingularJacobian: return "SingularJacobian";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

CurvatureTarget CurvatureTarget::gauss_bonnet(int k) {
  detail::require(k >= 1, "order must be >= 1");
  CurvatureTarget t;
  t.k_ = k;
  return t;
}

CurvatureTarget CurvatureTarget::functional(Functional G) {
  CurvatureTarget t;
  t.G_ = std::move(G);
  return t;
}

NodalField CurvatureTarget::evaluate(const ConformalMetric& cm) const {
  if (!G_) return gb_field(cm, k_);
  const Eigen::MatrixXd s = gb_fields(cm, G_->arity());
  NodalField out{cm.grid(), Eigen::VectorXd(s.rows())};
  std::vector<double> x(s.cols());
  for (Eigen::Index j = 0; j < s.rows(); ++j) {
    for (Eigen::Index c = 0; c < s.cols(); ++c) x[c] = s(j, c);
    out.values[j] = (*G_)(x);
  }
  return out;
}

std::string CurvatureTarget::describe() const {
  return G_ ? "G:" + G_->name() : "S^(" + std::to_string(2 * k_) + ")";
}

double CurvatureTarget::space_form_value(const SpaceForm& sf) const {
  if (!G_) return space_form_gauss_bonnet(sf.dim(), k_, sf.curvature());
  return generalized_constants(sf, *G_).value;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> admissible_degrees(Parity parity, int count) {
  std::vector<int> d(count);
  for (int i = 0; i < count; ++i) d[i] = parity == Parity::Even ? 2 * i : i;
  return d;
}

struct Evaluation {
  Eigen::VectorXd F;
  double residual = 0.0;
  double drift = 0.0;
  double mean = 0.0;
};

// The square system F(z) = 0 for z = (w coefficients, c / s), where s is the
// size of the target at the space form. The volume row is multiplied by s
// as well, so the (w_0, c, volume) block is not badly scaled.
class NewtonSystem {
 public:
  NewtonSystem(const SpaceForm& sf, const LatitudeField& psi, const CurvatureTarget& target, const SolverConfig& cfg)
      : sf_(sf),
        target_(target),
        degrees_(admissible_degrees(sf.parity(), cfg.M)),
        wdeg_(degrees_.back()),
        grid_(make_grid(sf.dim(), std::max(wdeg_, psi.max_degree()), cfg.nodes)),
        psi_(psi.on_grid(grid_)),
        scale_(std::max(1.0, std::abs(target.space_form_value(sf)))) {}

  int size() const { return static_cast<int>(degrees_.size()) + 1; }
  const GridPtr& grid() const { return grid_; }
  const std::vector<int>& degrees() const { return degrees_; }

  LatitudeField w_of(const Eigen::VectorXd& z) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(wdeg_ + 1);
    for (std::size_t i = 0; i < degrees_.size(); ++i) c[degrees_[i]] = z[static_cast<Eigen::Index>(i)];
    return LatitudeField(grid_, std::move(c), sf_.parity());
  }

  Eigen::VectorXd z_of(const LatitudeField& w, double constant) const {
    Eigen::VectorXd z(size());
    for (std::size_t i = 0; i < degrees_.size(); ++i) z[static_cast<Eigen::Index>(i)] = w.coeff(degrees_[i]);
    z[size() - 1] = constant / scale_;
    return z;
  }

  double constant_of(const Eigen::VectorXd& z) const { return scale_ * z[size() - 1]; }

  ConformalMetric metric(const Eigen::VectorXd& z) const { return ConformalMetric(sf_, psi_ + w_of(z)); }

  Evaluation evaluate(const Eigen::VectorXd& z) const {
    const ConformalMetric cm = metric(z);
    const NodalField q = target_.evaluate(cm);
    const double c = constant_of(z);
    Evaluation e;
    e.F.resize(size());
    const Eigen::VectorXd wq = grid_->weights().cwiseProduct(q.values);
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
      const int d = degrees_[i];
      e.F[static_cast<Eigen::Index>(i)] = grid_->basis().col(d).dot(wq) / grid_->norms()[d] - (d == 0 ? c : 0.0);
    }
    const double rel_vol = volume(cm) / sf_.volume() - 1.0;
    e.F[size() - 1] = scale_ * rel_vol;
    e.residual = (q.values.array() - c).abs().maxCoeff();
    e.drift = std::abs(rel_vol);
    e.mean = q.mean();
    return e;
  }

  Eigen::MatrixXd jacobian(const Eigen::VectorXd& z, double h) const {
    const int m = size();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    parallel_for(m - 1, [&](int j) {
      Eigen::VectorXd zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      J.col(j) = (evaluate(zp).F - evaluate(zm).F) / (2.0 * h);
    });
    // F is affine in c.
    J(0, m - 1) = -scale_;
    return J;
  }

 private:
  static GridPtr make_grid(int n, int top_degree, int nodes) {
    GridPtr g = LatitudeGrid::make(n, nodes > 0 ? nodes : 2 * top_degree + 2);
    detail::require(g->max_degree() >= top_degree, "too few quadrature nodes for the requested degrees");
    return g;
  }

  SpaceForm sf_;
  CurvatureTarget target_;
  std::vector<int> degrees_;
  int wdeg_;
  GridPtr grid_;
  LatitudeField psi_;
  double scale_;
};

double merit(const Evaluation& e) { return e.F.cwiseAbs().maxCoeff(); }

}  // namespace

SolverReport solve(const SpaceForm& sf, const LatitudeField& psi, const CurvatureTarget& target,
                   const SolverConfig& cfg, const std::optional<LatitudeField>& warm_start) {
  cfg.validate();
  detail::require(sf.is_closed_model(), "Newton solves need a closed space form model");
  detail::require(psi.grid()->dim() == sf.dim(), "perturbation lives on a grid of another dimension");
  if (sf.quotient() == Quotient::RealProjective)
    detail::require(psi.parity() == Parity::Even, "perturbations of RP^n must have even parity");

  const NewtonSystem sys(sf, psi, target, cfg);
  const int m = sys.size();

  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  if (warm_start) z = sys.z_of(*warm_start, 0.0);
  Evaluation cur = sys.evaluate(z);
  z = sys.z_of(sys.w_of(z), cur.mean);
  cur = sys.evaluate(z);

  SolverReport report;
  report.nodes = sys.grid()->size();
  report.iterations.push_back({0, cur.residual, cur.drift, 0.0, 0.0});

  for (int it = 1;; ++it) {
    if (cur.residual <= cfg.tol_residual && cur.drift <= cfg.tol_volume) {
      report.status = SolverStatus::Converged;
      break;
    }
    if (it > cfg.max_iter) {
      report.status = SolverStatus::MaxIterations;
      break;
    }

    const Eigen::MatrixXd J = sys.jacobian(z, cfg.fd_jacobian_step);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    report.jacobian_max_singular_value = sv[0];
    report.jacobian_min_singular_value = sv[sv.size() - 1];

    Eigen::VectorXd dz;
    if (cfg.step_rule == StepRule::Exact) {
      if (!(sv[sv.size() - 1] >= 1e-10 * sv[0])) {
        report.status = SolverStatus::SingularJacobian;
        break;
      }
      dz = -svd.solve(cur.F);
    } else {
      const Eigen::VectorXd uf = svd.matrixU().transpose() * cur.F;
      Eigen::VectorXd coef = Eigen::VectorXd::Zero(m);
      for (int i = 0; i < m; ++i)
        if (sv[i] > cfg.pinv_cutoff * sv[0]) coef[i] = uf[i] / sv[i];
      dz = -svd.matrixV() * coef;
    }

    // Backtracking only when the initial step does not reduce the merit.
    double t = cfg.damping;
    Eigen::VectorXd trial = z + t * dz;
    Evaluation next = sys.evaluate(trial);
    const double m0 = merit(cur);
    if (merit(next) > m0) {
      while (t > 1.0 / 1024.0) {
        t *= 0.5;
        trial = z + t * dz;
        next = sys.evaluate(trial);
        if (merit(next) <= (1.0 - 1e-4 * t) * m0) break;
      }
    }
    z = trial;
    cur = next;
    report.iterations.push_back({it, cur.residual, cur.drift, t * dz.norm(), t});
  }

  report.w = sys.w_of(z);
  report.achieved_constant = sys.constant_of(z);
  return report;
}

SolverReport newton_solve(const SpaceForm& sf, const LatitudeField& psi, int k, const SolverConfig& cfg,
                          const std::optional<LatitudeField>& warm_start) {
  detail::require(k >= 1 && 2 * k < sf.dim(), "newton_solve needs 1 <= k and 2k < n");
  return solve(sf, psi, CurvatureTarget::gauss_bonnet(k), cfg, warm_start);
}

SolverReport generalized_solve(const SpaceForm& sf, const LatitudeField& psi, const Functional& G,
                               const SolverConfig& cfg, const std::optional<LatitudeField>& warm_start) {
  generalized_constants(sf, G);
  return solve(sf, psi, CurvatureTarget::functional(G), cfg, warm_start);
}

Eigen::MatrixXd newton_jacobian_at_space_form(const SpaceForm& sf, const CurvatureTarget& target,
                                              const SolverConfig& cfg) {
  cfg.validate();
  const GridPtr probe = LatitudeGrid::make(sf.dim(), 1);
  const NewtonSystem sys(sf, LatitudeField::zero(probe, 0, sf.parity()), target, cfg);
  const Eigen::VectorXd z = sys.z_of(LatitudeField::zero(sys.grid(), 0, sf.parity()), target.space_form_value(sf));
  return sys.jacobian(z, cfg.fd_jacobian_step);
}

KernelDemo sphere_kernel_demo(int n, double mu, int k, const SolverConfig& cfg) {
  const CurvatureTarget target = CurvatureTarget::gauss_bonnet(k);
  KernelDemo out;
  out.even_singular_values =
      newton_jacobian_at_space_form(SpaceForm::real_projective(n, mu), target, cfg).jacobiSvd().singularValues();
  out.full_singular_values =
      newton_jacobian_at_space_form(SpaceForm::full_sphere(n, mu), target, cfg).jacobiSvd().singularValues();
  out.even_min_sv = out.even_singular_values.minCoeff();
  out.full_min_sv = out.full_singular_values.minCoeff();
  return out;
}

SweepResult continuation_sweep(const SpaceForm& sf, const LatitudeField& direction, const std::vector<double>& amplitudes,
                               int k, const SolverConfig& cfg, bool warm) {
  for (std::size_t i = 1; i < amplitudes.size(); ++i)
    detail::require(amplitudes[i] > amplitudes[i - 1], "amplitudes must increase");
  SweepResult out;
  std::optional<LatitudeField> previous;
  for (double a : amplitudes) {
    SolverReport r = newton_solve(sf, a * direction, k, cfg, warm ? previous : std::nullopt);
    out.amplitudes.push_back(a);
    const bool ok = r.converged();
    if (ok) previous = r.w;
    out.reports.push_back(std::move(r));
    if (!ok) {
      out.first_failure = a;
      break;
    }
  }
  return out;
}

double roundoff_floor(const SolverReport& report) {
  return 1e4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(report.achieved_constant));
}

bool quadratic_tail(const SolverReport& report, double kappa, int steps) {
  const auto& it = report.iterations;
  if (static_cast<int>(it.size()) < steps + 1) return false;
  // Residuals cannot drop below the rounding level of the nodal values.
  const double floor = roundoff_floor(report);
  for (std::size_t i = it.size() - steps; i < it.size(); ++i)
    if (!(it[i].residual <= std::max(kappa * it[i - 1].residual * it[i - 1].residual, floor))) return false;
  return true;
}

FixedPointCertificate certify_fixed_point(const SpaceForm& sf, const LatitudeField& psi, const SolverReport& report,
                                          const CurvatureTarget& target) {
  detail::require(report.w.has_value(), "report carries no solution");
  const int nodes = 2 * report.nodes;
  const GridPtr fine = LatitudeGrid::make(sf.dim(), nodes);
  const int capacity = 2 * std::max(report.w->max_degree(), psi.max_degree());
  const LatitudeField phi = psi.on_grid(fine).resized(capacity) + report.w->on_grid(fine);
  const ConformalMetric cm(sf, phi);
  const NodalField q = target.evaluate(cm);
  FixedPointCertificate c;
  c.nodes = nodes;
  c.sup_variation = q.variation();
  c.max_deviation = (q.values.array() - report.achieved_constant).abs().maxCoeff();
  c.volume_drift = std::abs(volume(cm) / sf.volume() - 1.0);
  return c;
}

}  // namespace gby
