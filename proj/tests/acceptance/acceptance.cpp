// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Each line carries the measured worst case and runtime.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "gby/error.hpp"
#include "support.hpp"

using namespace gby;
using namespace gby::testing;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

void require(Verdict& v, bool ok) { v.pass = v.pass && ok; }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Closed forms for S^(2k) and the 2k-Ricci tensor at constant curvature.
Verdict closed_forms() {
  Verdict v;
  double worst = 0.0;
  int cases = 0;
  for (int n = 5; n <= 8; ++n)
    for (int k = 1; 2 * k < n; ++k)
      for (double mu : {-2.0, -1.0, 1.0, 2.0}) {
        const CurvatureLike R = space_form_curvature(n, mu);
        const SymmetricBilinear g = SymmetricBilinear::identity(n);
        worst = std::max(worst, rel_err(gauss_bonnet(R, g, k), gauss_bonnet_closed_form(n, k, mu)));
        const Eigen::MatrixXd ric = ricci_2k(R, g, k).matrix();
        const double want = ricci_closed_form(n, k, mu);
        worst = std::max(worst, (ric - want * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() / std::abs(want));
        ++cases;
      }
  require(v, worst <= 1e-11);
  v.detail = fmt("%d cases, max rel err %.2e (tol 1e-11)", cases, worst);
  return v;
}

// 2. Kronecker-delta evaluator against the double-form evaluator.
Verdict pipeline_equivalence() {
  Verdict v;
  double worst = 0.0, spread = 0.0;
  std::mt19937_64 rng(20240612);
  for (auto [n, k] : {std::pair{5, 1}, {5, 2}, {6, 2}, {7, 2}, {7, 3}}) {
    const KroneckerCalibration c = calibrate_kronecker_constant(n, k, 20);
    spread = std::max(spread, c.relative_spread);
    const SymmetricBilinear g = SymmetricBilinear::identity(n);
    for (int s = 0; s < 20; ++s) {
      const CurvatureLike R = random_curvature_like(n, rng);
      worst = std::max(worst, rel_err(gauss_bonnet_kronecker(R, k, c.value), gauss_bonnet(R, g, k)));
    }
  }
  require(v, worst <= 1e-9 && spread <= 1e-10);
  v.detail = fmt("max rel err %.2e (tol 1e-9), calibration spread %.2e (tol 1e-10)", worst, spread);
  return v;
}

// 3. Algebra properties, 200 randomized cases each.
Verdict algebra_properties() {
  Verdict v;
  std::mt19937_64 rng(20240613);
  std::uniform_int_distribution<int> deg(1, 3), dim(3, 6), small(0, 2);
  double adjoint = 0.0, assoc = 0.0, frame = 0.0, trace = 0.0;
  int closure_failures = 0;
  for (int c = 0; c < 200; ++c) {
    const int n = dim(rng);
    const SymmetricBilinear id = SymmetricBilinear::identity(n);
    const int p = std::min(deg(rng), n), q = std::min(deg(rng), n);
    const DoubleForm a = random_form(n, p - 1, q - 1, rng), b = random_form(n, p, q, rng);
    adjoint = std::max(adjoint, rel_diff(inner(metric_multiply(id, a), b), inner(a, contract(id, b))));

    int d[6];
    for (int& x : d) x = small(rng);
    while (d[0] + d[2] + d[4] > n) d[4] = 0, d[2] = std::max(0, d[2] - 1);
    while (d[1] + d[3] + d[5] > n) d[5] = 0, d[3] = std::max(0, d[3] - 1);
    const DoubleForm x = random_form(n, d[0], d[1], rng), y = random_form(n, d[2], d[3], rng),
                     z = random_form(n, d[4], d[5], rng);
    const DoubleForm lhs = product(product(x, y), z);
    assoc = std::max(assoc, (lhs - product(x, product(y, z))).max_abs() / std::max(1.0, lhs.max_abs()));

    const Eigen::MatrixXd gram = random_spd(n, rng);
    const SymmetricBilinear g = SymmetricBilinear::from_matrix(gram);
    const Eigen::MatrixXd f = g.orthonormal_frame();
    const DoubleForm r = random_symmetric(n, 2, rng);
    const DoubleForm c1 = contract_in_frame(f * random_orthogonal(n, rng), r);
    const DoubleForm c2 = contract_in_frame(f * random_orthogonal(n, rng), r);
    frame = std::max(frame, (c1 - c2).max_abs() / std::max(1.0, c1.max_abs()));

    trace = std::max(trace, std::abs(contract(g, g).coeffs()[0] - n) / n);

    const DoubleForm s = random_symmetric(n, 1, rng);
    for (const DoubleForm& w : {product(r, s), product(s, s), contract(g, r), contract(g, product(r, s))})
      if (!is_in_symmetry_class(w, 1e-12 * std::max(1.0, w.max_abs()))) ++closure_failures;
  }
  require(v, adjoint <= 1e-12 && assoc <= 1e-12 && frame <= 1e-12 && trace <= 1e-12 && closure_failures == 0);
  v.detail = fmt("adjoint %.1e, assoc %.1e, frame %.1e, c_g g - n %.1e, C-class failures %d (tol 1e-12)", adjoint,
                 assoc, frame, trace, closure_failures);
  return v;
}

// 4. Finite-difference check of the conformal linearization.
Verdict linearization_exactness() {
  Verdict v;
  double worst = 0.0, ratio_lo = 1e300, ratio_hi = 0.0;
  std::string worst_at;
  for (auto [n, k] : {std::pair{5, 2}, {6, 2}, {7, 2}, {7, 3}})
    for (double mu : {-1.0, 1.0}) {
      const SpaceForm sf = mu > 0 ? SpaceForm::real_projective(n, mu) : SpaceForm::synthetic_hyperbolic(n, mu, 0.3);
      const GridPtr grid = LatitudeGrid::make(n, 24);
      for (int l : {2, 4, 6, 8}) {
        const LatitudeField f = LatitudeField::mode(grid, l, l, Parity::Even);
        const double e3 = fd_verify(sf, f, k, 1e-3).relerr, e2 = fd_verify(sf, f, k, 1e-2).relerr;
        if (e3 > worst) {
          worst = e3;
          worst_at = fmt("n=%d k=%d mu=%g l=%d", n, k, mu, l);
        }
        ratio_lo = std::min(ratio_lo, e2 / e3);
        ratio_hi = std::max(ratio_hi, e2 / e3);
      }
    }
  require(v, worst <= 1e-6 && ratio_lo >= 50.0 && ratio_hi <= 200.0);
  v.detail = fmt("max relerr %.2e at %s (tol 1e-6), eps ratio in [%.1f, %.1f] (want [50, 200])", worst,
                 worst_at.c_str(), ratio_lo, ratio_hi);
  return v;
}

// 5. Spectral gap and the kernel of L.
Verdict spectral_gap() {
  Verdict v;
  const SpectralGap rp = spectrum_gap_check(SpaceForm::real_projective(5, 1.0));
  const SpectralGap s = spectrum_gap_check(SpaceForm::full_sphere(5, 1.0));
  require(v, std::abs(rp.lambda1 - 12.0) < 1e-10 && rp.n_mu == 5.0 && rp.pass);
  require(v, std::abs(s.lambda1 - 5.0) < 1e-10 && s.n_mu == 5.0 && !s.pass);

  const SpaceForm s5 = SpaceForm::full_sphere(5, 1.0), rp5 = SpaceForm::real_projective(5, 1.0);
  const GridPtr grid = LatitudeGrid::make(5, 40);
  const LatitudeField m1 = LatitudeField::mode(grid, 1, 1, Parity::Unrestricted);
  // Spectral and nodal versions of L applied to the l = 1 mode.
  const double kernel = std::max(L_operator(s5, m1).coeffs().cwiseAbs().maxCoeff(),
                                 (laplacian_nodal(s5, m1) - 5.0 * m1.values()).cwiseAbs().maxCoeff());
  require(v, kernel <= 1e-12);

  // On even modes of degree >= 2, D' L is at least 7 D' (the l = 2 value 12 - 5);
  // the constant mode has eigenvalue -n mu, also bounded away from zero.
  const double Dp = linearization_constants(5, 2, 1.0).Dprime;
  double margin = 1e300;
  for (int l = 2; l <= 30; l += 2) {
    const LatitudeField f = LatitudeField::mode(grid, l, l, Parity::Even);
    margin = std::min(margin, conformal_linearization(rp5, f, 2).coeff(l) / Dp);
  }
  const double constant_mode = std::abs(conformal_linearization(rp5, LatitudeField::constant(grid, 0, Parity::Even, 1.0), 2).coeff(0)) / Dp;
  require(v, margin >= 7.0 - 1e-12 && constant_mode >= 5.0 - 1e-12);
  v.detail = fmt("RP5 (%.12g, %g, %s), S5 (%.12g, %g, %s), |L l=1| %.1e, even-mode margin %.6g D', l=0 %.6g D'",
                 rp.lambda1, rp.n_mu, rp.pass ? "true" : "false", s.lambda1, s.n_mu, s.pass ? "true" : "false", kernel,
                 margin, constant_mode);
  return v;
}

LatitudeField suite_perturbation() {
  return LatitudeField::mode(LatitudeGrid::make(5, 6), 2, 2, Parity::Even, 0.05);
}

// 6. Newton solve on RP^5.
Verdict constructive_solve() {
  Verdict v;
  const SpaceForm sf = SpaceForm::real_projective(5, 1.0);
  const LatitudeField psi = suite_perturbation();
  SolverConfig cfg;
  cfg.M = 16;
  const SolverReport r = newton_solve(sf, psi, 2, cfg);
  require(v, r.converged() && r.steps() <= 8);
  require(v, r.final_residual() <= 1e-10 && r.final_volume_drift() <= 1e-10);
  const bool tail = quadratic_tail(r, 1e3, 2);
  require(v, tail);
  const FixedPointCertificate c = certify_fixed_point(sf, psi, r, CurvatureTarget::gauss_bonnet(2));
  require(v, c.sup_variation <= 1e-9 && c.max_deviation <= 1e-9);
  v.detail = fmt("%s in %d steps, residual %.2e, drift %.2e, quadratic tail %s (kappa 1e3, floor %.1e), "
                 "certificate var %.2e dev %.2e on %d nodes, c = %.12g",
                 to_string(r.status).c_str(), r.steps(), r.final_residual(), r.final_volume_drift(),
                 tail ? "yes" : "no", roundoff_floor(r), c.sup_variation, c.max_deviation, c.nodes,
                 r.achieved_constant);
  return v;
}

// 7. Round-sphere degeneracy.
Verdict sphere_degeneracy() {
  Verdict v;
  const KernelDemo d = sphere_kernel_demo(5, 1.0, 2, SolverConfig{});
  require(v, d.full_min_sv <= 1e-3 * d.even_min_sv);
  v.detail = fmt("full %.2e vs even %.2e, ratio %.1e (tol 1e-3)", d.full_min_sv, d.even_min_sv,
                 d.full_min_sv / d.even_min_sv);
  return v;
}

// 8. Generalized functional.
Verdict generalized_functional() {
  Verdict v;
  const SpaceForm sf = SpaceForm::real_projective(5, 1.0);
  const SolverReport r = generalized_solve(sf, suite_perturbation(), Functional::linear({1.0, 0.1}), SolverConfig{});
  require(v, r.converged() && std::abs(r.achieved_constant - 13.0) <= 0.05 * 13.0);
  const double slope = -linearization_constants(5, 2, 1.0).D / linearization_constants(5, 1, 1.0).D;
  bool rejected = false;
  try {
    generalized_solve(sf, suite_perturbation(), Functional::linear({slope, 1.0}), SolverConfig{});
  } catch (const NondegeneracyViolated&) {
    rejected = true;
  }
  require(v, rejected);
  v.detail = fmt("%s, c = %.12g (want 13 +- 5%%), degenerate G %s", to_string(r.status).c_str(), r.achieved_constant,
                 rejected ? "rejected" : "accepted");
  return v;
}

// 9. Conformal transformation law against the warped-product formulas.
Verdict cross_pipeline() {
  Verdict v;
  std::mt19937_64 rng(20240614);
  double worst = 0.0;
  int fields = 0;
  for (int n : {5, 6}) {
    const SpaceForm sf = SpaceForm::full_sphere(n, 1.0);
    const GridPtr grid = LatitudeGrid::make(n, 24);
    for (int t = 0; t < 20; ++t, ++fields) {
      const ConformalMetric cm(sf, random_field(grid, 12, Parity::Unrestricted, 0.2, rng));
      for (int j = 0; j < grid->size(); ++j) {
        const DoubleForm a = conformal_curvature(cm, j).form(), b = warped_curvature(cm, j).form();
        worst = std::max(worst, (a - b).max_abs() / std::max(1.0, b.max_abs()));
      }
    }
  }
  require(v, worst <= 1e-9);
  v.detail = fmt("%d fields, max rel diff %.2e (tol 1e-9)", fields, worst);
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
  };
  const Criterion criteria[] = {
      {1, "closed-form reproduction", 10, closed_forms},
      {2, "pipeline equivalence", 120, pipeline_equivalence},
      {3, "algebra property suite", 30, algebra_properties},
      {4, "linearization exactness", 120, linearization_exactness},
      {5, "spectral gap", 5, spectral_gap},
      {6, "constructive local solve", 60, constructive_solve},
      {7, "round-sphere degeneracy", 30, sphere_degeneracy},
      {8, "generalized functional", 60, generalized_functional},
      {9, "cross-pipeline curvature", 60, cross_pipeline},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = v.pass && secs < c.budget_s;
    failures += !ok;
    std::printf("%s criterion %d (%s): %s [%.2fs of %.0fs]\n", ok ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
