#include <doctest.h>

#include <atomic>
#include <cstdlib>

#include "gby/error.hpp"
#include "gby/parallel.hpp"
#include "support.hpp"

using namespace gby;
using namespace gby::testing;

namespace {

const SpaceForm& rp5() {
  static const SpaceForm sf = SpaceForm::real_projective(5, 1.0);
  return sf;
}

LatitudeField even_mode(int degree, double amp, int n = 5) {
  return LatitudeField::mode(LatitudeGrid::make(n, 2 * degree + 2), degree, degree, Parity::Even, amp);
}

// e^{2(psi + w)} at the nodes of `grid`.
Eigen::VectorXd conformal_factor(const LatitudeField& psi, const LatitudeField& w, const GridPtr& grid) {
  const int top = std::max(psi.max_degree(), w.max_degree());
  const LatitudeField phi = psi.on_grid(grid).resized(top) + w.on_grid(grid);
  return (2.0 * phi.values().array()).exp().matrix();
}

}  // namespace

TEST_CASE("solver configuration is validated") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.M = 3;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.tol_residual = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.damping = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK_THROWS_AS(newton_solve(rp5(), even_mode(2, 0.05), 3, SolverConfig{}), InvalidArgument);
  CHECK_THROWS_AS(newton_solve(SpaceForm::synthetic_hyperbolic(5, -1.0, 0.3), even_mode(2, 0.05), 2, SolverConfig{}),
                  InvalidArgument);
}

TEST_CASE("unperturbed space form is already a solution") {
  const SolverReport r = newton_solve(rp5(), even_mode(0, 0.0), 2, SolverConfig{});
  REQUIRE(r.converged());
  CHECK(r.steps() <= 1);
  CHECK(r.achieved_constant == doctest::Approx(30.0).epsilon(1e-13));
  CHECK(r.w->coeffs().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant perturbations are absorbed by w") {
  const double a = 0.1;
  const SolverReport r = newton_solve(rp5(), even_mode(0, a), 2, SolverConfig{});
  REQUIRE(r.converged());
  CHECK(r.w->coeff(0) == doctest::Approx(-a).epsilon(1e-10));
  CHECK(r.achieved_constant == doctest::Approx(30.0).epsilon(1e-10));
}

TEST_CASE("degree-2 perturbation converges quadratically to a certified fixed point") {
  const LatitudeField psi = even_mode(2, 0.05);
  const SolverConfig cfg;
  const SolverReport r = newton_solve(rp5(), psi, 2, cfg);
  REQUIRE(r.converged());
  CHECK(r.steps() <= 6);
  CHECK(r.final_residual() <= 1e-10);
  CHECK(r.final_volume_drift() <= 1e-10);
  CHECK(quadratic_tail(r, 1e3));
  CHECK(std::abs(r.achieved_constant - 30.0) <= 0.05 * 30.0);
  CHECK(r.nodes == 2 * 30 + 2);
  CHECK(r.jacobian_min_singular_value > 1.0);

  const FixedPointCertificate c = certify_fixed_point(rp5(), psi, r, CurvatureTarget::gauss_bonnet(2));
  CHECK(c.nodes == 2 * r.nodes);
  CHECK(c.sup_variation <= 10 * cfg.tol_residual);
  CHECK(c.max_deviation <= 10 * cfg.tol_residual);
  CHECK(c.volume_drift <= cfg.tol_volume);
}

TEST_CASE("higher-order and higher-dimensional solves") {
  // With c = 630 the nodal residual bottoms out near 1.5e-10 from rounding in
  // the high-degree derivatives, so the default 1e-10 is only met by chance.
  SolverConfig cfg;
  cfg.tol_residual = 1e-9;
  const SolverReport r7 = newton_solve(SpaceForm::real_projective(7, 1.0), even_mode(4, 0.04, 7), 3, cfg);
  REQUIRE(r7.converged());
  CHECK(quadratic_tail(r7, 1e3));
  const SolverReport r6 = newton_solve(SpaceForm::real_projective(6, 2.0), even_mode(2, 0.05, 6), 2, SolverConfig{});
  REQUIRE(r6.converged());
  CHECK(std::abs(r6.achieved_constant - space_form_gauss_bonnet(6, 2, 2.0)) < 0.05 * space_form_gauss_bonnet(6, 2, 2.0));
}

TEST_CASE("quadratic tail detection") {
  SolverReport r;
  r.achieved_constant = 30.0;
  r.iterations = {{0, 1e-1, 0, 0, 0}, {1, 1e-2, 0, 0, 1}, {2, 1e-4, 0, 0, 1}, {3, 1e-8, 0, 0, 1}};
  CHECK(quadratic_tail(r, 1.0));
  CHECK_FALSE(quadratic_tail(r, 0.5));
  r.iterations.push_back({4, 1e-13, 0, 0, 1});  // at the rounding level of |c| = 30
  CHECK(quadratic_tail(r, 1.0));
  r.iterations = {{0, 1e-1, 0, 0, 0}, {1, 5e-2, 0, 0, 1}, {2, 2.5e-2, 0, 0, 1}};
  CHECK_FALSE(quadratic_tail(r, 1.0));
}

TEST_CASE("gauge consistency under constant shifts of psi") {
  const LatitudeField psi = even_mode(2, 0.05);
  const LatitudeField shifted = psi + LatitudeField::constant(psi.grid(), 0, Parity::Even, 0.07);
  const SolverReport a = newton_solve(rp5(), psi, 2, SolverConfig{});
  const SolverReport b = newton_solve(rp5(), shifted, 2, SolverConfig{});
  REQUIRE(a.converged());
  REQUIRE(b.converged());
  const GridPtr grid = a.w->grid();
  const Eigen::VectorXd fa = conformal_factor(psi, *a.w, grid), fb = conformal_factor(shifted, *b.w, grid);
  CHECK((fa - fb).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(a.achieved_constant == doctest::Approx(b.achieved_constant).epsilon(1e-10));
}

TEST_CASE("generalized solve") {
  const LatitudeField psi = even_mode(2, 0.05);
  const SolverReport plain = newton_solve(rp5(), psi, 2, SolverConfig{});
  const SolverReport proj = generalized_solve(rp5(), psi, Functional::projection(2), SolverConfig{});
  REQUIRE(proj.converged());
  CHECK(proj.steps() == plain.steps());
  CHECK(proj.achieved_constant == doctest::Approx(plain.achieved_constant).epsilon(1e-12));
  CHECK((proj.w->coeffs() - plain.w->coeffs()).cwiseAbs().maxCoeff() < 1e-10);

  const SolverReport lin = generalized_solve(rp5(), psi, Functional::linear({1.0, 0.1}), SolverConfig{});
  REQUIRE(lin.converged());
  CHECK(std::abs(lin.achieved_constant - 13.0) <= 0.05 * 13.0);
  CHECK(certify_fixed_point(rp5(), psi, lin, CurvatureTarget::functional(Functional::linear({1.0, 0.1}))).sup_variation <
        1e-9);

  CHECK_THROWS_AS(generalized_solve(rp5(), psi, Functional::linear({-6.0, 1.0}), SolverConfig{}), NondegeneracyViolated);
}

TEST_CASE("round sphere kernel") {
  SolverConfig cfg;
  cfg.M = 8;
  for (int k : {1, 2}) {
    const KernelDemo d = sphere_kernel_demo(5, 1.0, k, cfg);
    CHECK(d.full_min_sv <= 1e-8 * d.even_min_sv);
    CHECK(d.even_min_sv >= 1e3 * d.full_min_sv);
    CHECK(d.even_min_sv > 1.0);
  }
}

TEST_CASE("exact steps on the full sphere hit the kernel") {
  const GridPtr grid = LatitudeGrid::make(5, 8);
  const LatitudeField psi = LatitudeField::mode(grid, 3, 3, Parity::Unrestricted, 0.03);
  SolverConfig cfg;
  cfg.M = 8;
  const SolverReport r = newton_solve(SpaceForm::full_sphere(5, 1.0), psi, 2, cfg);
  CHECK(r.status == SolverStatus::SingularJacobian);
}

TEST_CASE("full-sphere solves commute with the equatorial reflection") {
  const GridPtr grid = LatitudeGrid::make(5, 8);
  const LatitudeField psi =
      LatitudeField::mode(grid, 2, 3, Parity::Unrestricted, 0.05) + LatitudeField::mode(grid, 3, 3, Parity::Unrestricted, 0.03);
  SolverConfig cfg;
  cfg.M = 8;
  cfg.step_rule = StepRule::PseudoInverse;
  const SpaceForm s5 = SpaceForm::full_sphere(5, 1.0);
  const SolverReport a = newton_solve(s5, psi, 2, cfg), b = newton_solve(s5, psi.reflected(), 2, cfg);
  REQUIRE(a.converged());
  REQUIRE(b.converged());
  CHECK((a.w->reflected().coeffs() - b.w->coeffs()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(a.achieved_constant == doctest::Approx(b.achieved_constant).epsilon(1e-12));
}

TEST_CASE("continuation sweep") {
  SolverConfig cfg;
  cfg.M = 8;
  const LatitudeField dir = even_mode(2, 1.0);
  std::vector<double> amps;
  for (int i = 0; i <= 10; ++i) amps.push_back(0.02 * i);
  const SweepResult s = continuation_sweep(rp5(), dir, amps, 2, cfg);
  REQUIRE(!s.reports.empty());
  CHECK(s.reports.front().converged());
  CHECK(s.reports.front().steps() <= 1);
  // Every run before the first failure converged, and nothing runs after it.
  for (std::size_t i = 0; i + 1 < s.reports.size(); ++i) CHECK(s.reports[i].converged());
  if (s.first_failure) {
    CHECK(*s.first_failure == s.amplitudes.back());
  } else {
    CHECK(s.reports.size() == amps.size());
  }
  CHECK_THROWS_AS(continuation_sweep(rp5(), dir, {0.1, 0.05}, 2, cfg), InvalidArgument);
}

TEST_CASE("warm start saves iterations") {
  SolverConfig cfg;
  cfg.M = 8;
  const LatitudeField dir = even_mode(2, 1.0);
  const SolverReport prev = newton_solve(rp5(), 0.08 * dir, 2, cfg);
  REQUIRE(prev.converged());
  const SolverReport cold = newton_solve(rp5(), 0.1 * dir, 2, cfg);
  const SolverReport warm = newton_solve(rp5(), 0.1 * dir, 2, cfg, prev.w);
  REQUIRE(cold.converged());
  REQUIRE(warm.converged());
  CHECK(warm.steps() < cold.steps());
}

TEST_CASE("parallel_for covers every index and propagates failures") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(257, [&](int i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(16, [](int i) {
                    if (i == 7) throw InvalidArgument("boom");
                  }),
                  InvalidArgument);
}

TEST_CASE("solver output does not depend on the worker count") {
  const LatitudeField psi = even_mode(2, 0.05);
  SolverConfig cfg;
  cfg.M = 8;
  ::setenv("GB_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  const SolverReport one = newton_solve(rp5(), psi, 2, cfg);
  ::setenv("GB_THREADS", "4", 1);
  CHECK(worker_count() == 4);
  const SolverReport four = newton_solve(rp5(), psi, 2, cfg);
  ::unsetenv("GB_THREADS");
  CHECK(one.w->coeffs() == four.w->coeffs());
  CHECK(one.achieved_constant == four.achieved_constant);
}
