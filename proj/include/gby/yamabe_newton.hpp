#pragma once

// Newton solver for the conformal problem "S^(2k) of e^{2(psi + w)} g_mu is
// constant and the volume equals that of g_mu" on axisymmetric metrics.
//
// Unknowns are the coefficients of w on the first M admissible degrees
// together with the constant c; equations are the projections of
// S^(2k) - c onto the same degrees plus the volume constraint, giving a
// square (M+1) x (M+1) system. The Jacobian is assembled by central
// differences column by column.

#include <optional>
#include <string>
#include <vector>

#include "gby/linearization.hpp"

namespace gby {

enum class StepRule {
  Exact,          // solve with the full Jacobian; singular Jacobians abort
  PseudoInverse,  // truncated-SVD step, used where a kernel is expected
};

struct SolverConfig {
  int M = 16;  // number of admissible degrees carried by w
  int max_iter = 30;
  double tol_residual = 1e-10;  // sup over nodes of |S - c|
  double tol_volume = 1e-10;    // |vol - nu| / nu
  double fd_jacobian_step = 1e-6;
  double damping = 1.0;  // initial step length of the line search
  int nodes = 0;         // quadrature nodes; 0 picks 2 * max degree + 2
  StepRule step_rule = StepRule::Exact;
  double pinv_cutoff = 1e-8;  // relative singular value cutoff for PseudoInverse

  void validate() const;
};

enum class SolverStatus { Converged, MaxIterations, SingularJacobian };

std::string to_string(SolverStatus s);

struct IterationRecord {
  int iteration = 0;
  double residual = 0.0;      // sup-norm of S - c on the grid
  double volume_drift = 0.0;  // |vol - nu| / nu
  double step_norm = 0.0;     // Euclidean norm of the step that led here
  double step_length = 0.0;   // line-search factor of that step
};

struct SolverReport {
  SolverStatus status = SolverStatus::MaxIterations;
  std::vector<IterationRecord> iterations;
  double achieved_constant = 0.0;
  std::optional<LatitudeField> w;
  double jacobian_min_singular_value = 0.0;
  double jacobian_max_singular_value = 0.0;
  int nodes = 0;

  bool converged() const { return status == SolverStatus::Converged; }
  int steps() const { return iterations.empty() ? 0 : static_cast<int>(iterations.size()) - 1; }
  double final_residual() const { return iterations.back().residual; }
  double final_volume_drift() const { return iterations.back().volume_drift; }
};

// Pointwise quantity whose constancy is sought: S^(2k) or G(S^(2), ...).
class CurvatureTarget {
 public:
  static CurvatureTarget gauss_bonnet(int k);
  static CurvatureTarget functional(Functional G);

  NodalField evaluate(const ConformalMetric& cm) const;
  std::string describe() const;
  // Value at the undeformed space form.
  double space_form_value(const SpaceForm& sf) const;

 private:
  int k_ = 0;
  std::optional<Functional> G_;
};

SolverReport newton_solve(const SpaceForm& sf, const LatitudeField& psi, int k, const SolverConfig& cfg,
                          const std::optional<LatitudeField>& warm_start = std::nullopt);

// Rejects G with NondegeneracyViolated before iterating.
SolverReport generalized_solve(const SpaceForm& sf, const LatitudeField& psi, const Functional& G,
                               const SolverConfig& cfg, const std::optional<LatitudeField>& warm_start = std::nullopt);

SolverReport solve(const SpaceForm& sf, const LatitudeField& psi, const CurvatureTarget& target,
                   const SolverConfig& cfg, const std::optional<LatitudeField>& warm_start = std::nullopt);

// The Newton Jacobian at w = 0, c = target value, for psi = 0.
Eigen::MatrixXd newton_jacobian_at_space_form(const SpaceForm& sf, const CurvatureTarget& target,
                                              const SolverConfig& cfg);

struct KernelDemo {
  double even_min_sv = 0.0;  // RP^n sector
  double full_min_sv = 0.0;  // all degrees on S^n, including l = 1
  Eigen::VectorXd even_singular_values;
  Eigen::VectorXd full_singular_values;
};

KernelDemo sphere_kernel_demo(int n, double mu, int k, const SolverConfig& cfg);

struct SweepResult {
  std::vector<double> amplitudes;
  std::vector<SolverReport> reports;
  std::optional<double> first_failure;
};

// Newton runs at psi = a * direction for increasing a, each warm-started
// from the previous solution when `warm` is set. Stops at the first failure.
SweepResult continuation_sweep(const SpaceForm& sf, const LatitudeField& direction, const std::vector<double>& amplitudes,
                               int k, const SolverConfig& cfg, bool warm = true);

// Rounding level of the residual, 1e4 * machine epsilon * |c|; the second
// derivatives of high-degree modes lose a few digits beyond plain summation.
double roundoff_floor(const SolverReport& report);

// residual_{i+1} <= kappa * residual_i^2 for each of the last `steps` steps;
// a residual at or below roundoff_floor counts as satisfying the bound.
bool quadratic_tail(const SolverReport& report, double kappa, int steps = 2);

struct FixedPointCertificate {
  int nodes = 0;
  double sup_variation = 0.0;  // max - min of the target on the refined grid
  double max_deviation = 0.0;  // sup |target - achieved constant|
  double volume_drift = 0.0;
};

// Re-evaluates the solution on a grid with twice the nodes and twice the degree capacity.
FixedPointCertificate certify_fixed_point(const SpaceForm& sf, const LatitudeField& psi, const SolverReport& report,
                                          const CurvatureTarget& target);

}  // namespace gby
