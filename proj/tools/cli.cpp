#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <random>
#include <utility>
#include <sstream>

#include "gby/error.hpp"
#include "gby/yamabe_newton.hpp"

namespace gby::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
  std::string command;
  int n = 5;
  int k = 2;
  double mu = 1.0;
  std::string quotient = "rp";
  double lambda1 = 0.0;
  int M = 16;
  double tol = 1e-10;
  int mode = 2;
  std::optional<double> amp;  // 1 for verify-linearization, 0.05 otherwise
  std::vector<double> coeffs;
  double eps = 1e-3;
  std::string G = "linear";
  std::vector<double> g_coeffs{1.0, 0.1};
  std::uint64_t seed = 20240611;
  int samples = 20;
  int cases = 200;
  std::vector<double> amplitudes{0.0, 0.02, 0.04, 0.06, 0.08, 0.1, 0.12, 0.14, 0.16, 0.18, 0.2};
  std::string output;
  std::string format = "json";
};

// Command result and the exit code it maps to once the report is written.
struct Outcome {
  ordered_json result;
  int code = kExitOk;
  std::vector<IterationRecord> history;
};

SpaceForm make_space_form(const Options& o) {
  if (o.quotient == "rp") return SpaceForm::real_projective(o.n, o.mu);
  if (o.quotient == "sphere") return SpaceForm::full_sphere(o.n, o.mu);
  if (o.lambda1 <= 0.0) throw InvalidArgument("--quotient hyperbolic needs --lambda1 > 0");
  return SpaceForm::synthetic_hyperbolic(o.n, o.mu, o.lambda1);
}

void require_order(const Options& o) {
  detail::require(o.k >= 1 && 2 * o.k < o.n, "need 1 <= k and 2k < n");
}

double amplitude(const Options& o) {
  if (o.amp) return *o.amp;
  return o.command == "verify-linearization" ? 1.0 : 0.05;
}

// The perturbation: --coeffs (by degree) when given, otherwise amp * mode.
LatitudeField make_perturbation(const Options& o, const SpaceForm& sf) {
  const Parity parity = sf.parity();
  if (!o.coeffs.empty()) {
    const int top = static_cast<int>(o.coeffs.size()) - 1;
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(o.coeffs.data(), top + 1);
    return LatitudeField(LatitudeGrid::make(o.n, 2 * top + 2), std::move(c), parity);
  }
  detail::require(o.mode >= 0, "--mode must be nonnegative");
  if (parity == Parity::Even && o.mode % 2 != 0)
    throw InvalidArgument("odd modes are not defined on RP^n");
  return LatitudeField::mode(LatitudeGrid::make(o.n, 2 * o.mode + 2), o.mode, o.mode, parity, amplitude(o));
}

SolverConfig make_config(const Options& o) {
  SolverConfig cfg;
  cfg.M = o.M;
  cfg.tol_residual = o.tol;
  cfg.tol_volume = o.tol;
  cfg.validate();
  return cfg;
}

ordered_json calibration_json(int n, int k) {
  ordered_json j{{"n", n}, {"k", k}};
  if (n > kKroneckerMaxDim || 2 * k > n) {
    j["available"] = false;
    return j;
  }
  const KroneckerCalibration c = cached_kronecker_constant(n, k);
  j["available"] = true;
  j["value"] = c.value;
  j["relative_spread"] = c.relative_spread;
  j["samples_used"] = c.samples_used;
  j["samples_skipped"] = c.samples_skipped;
  j["seed"] = c.seed;
  return j;
}

ordered_json field_json(const LatitudeField& f) {
  ordered_json j;
  j["parity"] = f.parity() == Parity::Even ? "even" : "unrestricted";
  j["coefficients"] = std::vector<double>(f.coeffs().begin(), f.coeffs().end());
  return j;
}

ordered_json report_json(const SolverReport& r) {
  ordered_json j;
  j["status"] = to_string(r.status);
  j["steps"] = r.steps();
  j["achieved_constant"] = r.achieved_constant;
  j["final_residual"] = r.final_residual();
  j["final_volume_drift"] = r.final_volume_drift();
  j["jacobian_min_singular_value"] = r.jacobian_min_singular_value;
  j["jacobian_max_singular_value"] = r.jacobian_max_singular_value;
  j["nodes"] = r.nodes;
  j["quadratic_tail"] = quadratic_tail(r, 1e3);
  ordered_json it = ordered_json::array();
  for (const auto& s : r.iterations)
    it.push_back({{"iteration", s.iteration},
                  {"residual", s.residual},
                  {"volume_drift", s.volume_drift},
                  {"step_norm", s.step_norm},
                  {"step_length", s.step_length}});
  j["iterations"] = std::move(it);
  if (r.w) j["w"] = field_json(*r.w);
  return j;
}

// ---------------------------------------------------------------------------

Outcome cmd_invariants(const Options& o) {
  require_order(o);
  Outcome out;
  const InvariantConstants ic = invariant_constants(o.n, o.k);
  out.result["gauss_bonnet"] = space_form_gauss_bonnet(o.n, o.k, o.mu);
  out.result["ricci_coefficient"] = space_form_ricci_coefficient(o.n, o.k, o.mu);
  out.result["C"] = ic.C_nk;
  out.result["lambda"] = ic.lambda_k;
  const LinearizationConstants lc = linearization_constants(o.n, o.k, o.mu);
  out.result["D"] = lc.D;
  out.result["Dprime"] = lc.Dprime;
  // Cross-check the closed forms against the double-form evaluator.
  const CurvatureLike R = space_form_curvature(o.n, o.mu);
  const SymmetricBilinear g = SymmetricBilinear::identity(o.n);
  out.result["gauss_bonnet_evaluated"] = gauss_bonnet(R, g, o.k);
  out.result["ricci_coefficient_evaluated"] = ricci_2k(R, g, o.k).matrix()(0, 0);
  return out;
}

DoubleForm random_form(int n, int p, int q, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DoubleForm w(n, p, q);
  for (double& c : w.coeffs()) c = u(rng);
  return w;
}

DoubleForm random_symmetric_form(int n, int p, std::mt19937_64& rng) {
  const DoubleForm w = random_form(n, p, p, rng);
  DoubleForm s(n, p, p);
  for (IndexMask a : SubsetTable::get(n).subsets(p))
    for (IndexMask b : SubsetTable::get(n).subsets(p)) s(a, b) = 0.5 * (w(a, b) + w(b, a));
  return s;
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

Outcome cmd_verify_algebra(const Options& o) {
  detail::require(o.n >= 2 && o.n <= 8, "verify-algebra needs 2 <= n <= 8");
  detail::require(o.cases >= 1, "--cases must be positive");
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<int> deg(0, 2);
  const SymmetricBilinear g = SymmetricBilinear::identity(o.n);

  double adjoint = 0.0, assoc = 0.0, frame = 0.0, trace = 0.0, closure = 0.0;
  for (int c = 0; c < o.cases; ++c) {
    const int p = deg(rng) + 1, q = deg(rng) + 1;
    const DoubleForm a = random_form(o.n, p - 1, q - 1, rng);
    const DoubleForm b = random_form(o.n, p, q, rng);
    adjoint = std::max(adjoint, std::abs(inner(metric_multiply(g, a), b) - inner(a, contract(g, b))));

    const DoubleForm x = random_form(o.n, 1, deg(rng), rng);
    const DoubleForm y = random_form(o.n, deg(rng), 1, rng);
    const DoubleForm z = random_form(o.n, 1, 1, rng);
    assoc = std::max(assoc, (product(product(x, y), z) - product(x, product(y, z))).max_abs());

    const DoubleForm r = random_symmetric_form(o.n, 2, rng);
    frame = std::max(frame, (contract_in_frame(random_orthogonal(o.n, rng), r) - contract(g, r)).max_abs());

    trace = std::max(trace, std::abs(contract(g, g).coeffs()[0] - o.n));

    const DoubleForm s = random_symmetric_form(o.n, 1, rng);
    const DoubleForm prod = product(r, s);
    const DoubleForm con = contract(g, r);
    double defect = 0.0;
    for (const DoubleForm* w : {&prod, &con}) {
      for (IndexMask i : SubsetTable::get(o.n).subsets(w->p()))
        for (IndexMask j : SubsetTable::get(o.n).subsets(w->p())) defect = std::max(defect, std::abs((*w)(i, j) - (*w)(j, i)));
    }
    closure = std::max(closure, defect);
  }
  Outcome out;
  const double tol = 1e-12;
  out.result["cases"] = o.cases;
  out.result["tolerance"] = tol;
  out.result["max_error"] = {{"adjointness", adjoint},
                             {"associativity", assoc},
                             {"frame_independence", frame},
                             {"trace_of_metric", trace},
                             {"symmetry_class_closure", closure}};
  const bool pass = std::max({adjoint, assoc, frame, trace, closure}) <= tol;
  out.result["pass"] = pass;
  if (!pass) out.code = kExitInternal;
  return out;
}

Outcome cmd_verify_linearization(const Options& o) {
  require_order(o);
  detail::require(o.eps > 0.0, "--eps must be positive");
  const SpaceForm sf = make_space_form(o);
  const LatitudeField f0 = make_perturbation(o, sf);
  const LatitudeField f = f0.on_grid(LatitudeGrid::make(o.n, std::max(2 * f0.max_degree() + 2, 24)));
  const FdVerification fine = fd_verify(sf, f, o.k, o.eps);
  const FdVerification coarse = fd_verify(sf, f, o.k, 10.0 * o.eps);
  const LinearizationConstants lc = linearization_constants(o.n, o.k, o.mu);
  Outcome out;
  out.result["D"] = lc.D;
  out.result["Dprime"] = lc.Dprime;
  out.result["relerr"] = fine.relerr;
  out.result["relerr_at_10eps"] = coarse.relerr;
  out.result["error_ratio"] = coarse.relerr / fine.relerr;
  out.result["exact_sup"] = fine.exact.sup_norm();
  out.result["fd_sup"] = fine.fd.sup_norm();
  out.result["within_1e-6"] = fine.relerr <= 1e-6;
  return out;
}

Outcome cmd_spectrum(const Options& o) {
  const SpaceForm sf = make_space_form(o);
  const SpectralGap gap = spectrum_gap_check(sf);
  Outcome out;
  out.result["lambda1"] = gap.lambda1;
  out.result["n_mu"] = gap.n_mu;
  out.result["pass"] = gap.pass;
  return out;
}

Outcome solver_outcome(const SolverReport& r) {
  Outcome out;
  out.result = report_json(r);
  out.history = r.iterations;
  if (!r.converged()) out.code = kExitNoConvergence;
  return out;
}

Outcome cmd_solve(const Options& o) {
  require_order(o);
  const SpaceForm sf = make_space_form(o);
  const LatitudeField psi = make_perturbation(o, sf);
  const SolverReport r = newton_solve(sf, psi, o.k, make_config(o));
  Outcome out = solver_outcome(r);
  out.result["space_form_value"] = space_form_gauss_bonnet(o.n, o.k, o.mu);
  if (r.converged()) {
    const FixedPointCertificate c = certify_fixed_point(sf, psi, r, CurvatureTarget::gauss_bonnet(o.k));
    out.result["certificate"] = {{"nodes", c.nodes},
                                 {"sup_variation", c.sup_variation},
                                 {"max_deviation", c.max_deviation},
                                 {"volume_drift", c.volume_drift}};
  }
  return out;
}

Functional make_functional(const Options& o) {
  if (o.G == "linear") return Functional::linear(o.g_coeffs);
  if (o.G == "projection") {
    detail::require(o.g_coeffs.size() == 1 && o.g_coeffs[0] >= 1.0, "--G projection takes --g-coeffs <order>");
    return Functional::projection(static_cast<int>(o.g_coeffs[0]));
  }
  throw InvalidArgument("unknown functional '" + o.G + "'");
}

Outcome cmd_solve_g(const Options& o) {
  const SpaceForm sf = make_space_form(o);
  const Functional G = make_functional(o);
  const GeneralizedConstants gc = generalized_constants(sf, G);
  const SolverReport r = generalized_solve(sf, make_perturbation(o, sf), G, make_config(o));
  Outcome out = solver_outcome(r);
  out.result["functional"] = {{"name", G.name()},
                              {"space_form_values", gc.space_form_values},
                              {"partials", gc.partials},
                              {"space_form_value", gc.value},
                              {"D", gc.D},
                              {"Dprime", gc.Dprime}};
  return out;
}

Outcome cmd_kernel_demo(const Options& o) {
  require_order(o);
  const KernelDemo d = sphere_kernel_demo(o.n, o.mu, o.k, make_config(o));
  Outcome out;
  out.result["even_min_sv"] = d.even_min_sv;
  out.result["full_min_sv"] = d.full_min_sv;
  out.result["ratio"] = d.full_min_sv / d.even_min_sv;
  out.result["even_singular_values"] = std::vector<double>(d.even_singular_values.begin(), d.even_singular_values.end());
  out.result["full_singular_values"] = std::vector<double>(d.full_singular_values.begin(), d.full_singular_values.end());
  return out;
}

Outcome cmd_sweep(const Options& o) {
  require_order(o);
  const SpaceForm sf = make_space_form(o);
  Options unit = o;
  unit.amp = 1.0;
  const SweepResult s = continuation_sweep(sf, make_perturbation(unit, sf), o.amplitudes, o.k, make_config(o));
  Outcome out;
  ordered_json runs = ordered_json::array();
  for (std::size_t i = 0; i < s.reports.size(); ++i) {
    const SolverReport& r = s.reports[i];
    runs.push_back({{"amplitude", s.amplitudes[i]},
                    {"status", to_string(r.status)},
                    {"steps", r.steps()},
                    {"achieved_constant", r.achieved_constant},
                    {"final_residual", r.final_residual()}});
  }
  out.result["runs"] = std::move(runs);
  out.result["first_failure"] = s.first_failure ? ordered_json(*s.first_failure) : ordered_json(nullptr);
  return out;
}

Outcome cmd_calibrate(const Options& o) {
  detail::require(o.k >= 1 && 2 * o.k <= o.n, "need 1 <= k and 2k <= n");
  detail::require(o.n <= kKroneckerMaxDim, "calibration needs n <= 7");
  const KroneckerCalibration c = calibrate_kronecker_constant(o.n, o.k, o.samples, o.seed);
  Outcome out;
  out.result = {{"value", c.value},
                {"relative_spread", c.relative_spread},
                {"samples_used", c.samples_used},
                {"samples_skipped", c.samples_skipped},
                {"seed", c.seed},
                {"expected_power_of_four", std::pow(0.25, o.k)}};
  return out;
}

// ---------------------------------------------------------------------------

ordered_json inputs_json(const Options& o) {
  ordered_json j{{"n", o.n}, {"k", o.k}, {"mu", o.mu}, {"quotient", o.quotient}};
  if (o.quotient == "hyperbolic") j["lambda1"] = o.lambda1;
  j["M"] = o.M;
  j["tol"] = o.tol;
  if (o.coeffs.empty()) {
    j["mode"] = o.mode;
    j["amp"] = amplitude(o);
  } else {
    j["coeffs"] = o.coeffs;
  }
  j["eps"] = o.eps;
  j["G"] = o.G;
  j["g_coeffs"] = o.g_coeffs;
  j["seed"] = o.seed;
  j["samples"] = o.samples;
  j["cases"] = o.cases;
  j["amplitudes"] = o.amplitudes;
  return j;
}

ordered_json calibrations_for(const Options& o) {
  ordered_json list = ordered_json::array();
  const int top = o.command == "solve-g" ? static_cast<int>(o.g_coeffs.size()) : o.k;
  const int first = o.command == "solve-g" ? 1 : o.k;
  for (int j = first; j <= top; ++j)
    if (j >= 1 && 2 * j <= o.n) list.push_back(calibration_json(o.n, j));
  return list;
}

std::string csv_of(const std::vector<IterationRecord>& history) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << "iteration,residual,volume_drift,step_norm\n";
  for (const auto& r : history) s << r.iteration << ',' << r.residual << ',' << r.volume_drift << ',' << r.step_norm << '\n';
  return s.str();
}

Outcome dispatch(const Options& o) {
  if (o.command == "invariants") return cmd_invariants(o);
  if (o.command == "verify-algebra") return cmd_verify_algebra(o);
  if (o.command == "verify-linearization") return cmd_verify_linearization(o);
  if (o.command == "spectrum") return cmd_spectrum(o);
  if (o.command == "solve") return cmd_solve(o);
  if (o.command == "solve-g") return cmd_solve_g(o);
  if (o.command == "kernel-demo") return cmd_kernel_demo(o);
  if (o.command == "sweep") return cmd_sweep(o);
  if (o.command == "calibrate") return cmd_calibrate(o);
  throw InvalidArgument("unknown command " + o.command);
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open output file " + o.output);
  f << text;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Gauss-Bonnet curvature toolkit on model space forms"};
  app.require_subcommand(1);

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--n", o.n, "dimension");
    sub->add_option("--k", o.k, "order, S^(2k)");
    sub->add_option("--mu", o.mu, "sectional curvature");
    sub->add_option("--quotient", o.quotient, "rp, sphere or hyperbolic")
        ->check(CLI::IsMember({"rp", "sphere", "hyperbolic"}));
    sub->add_option("--lambda1", o.lambda1, "first eigenvalue of the hyperbolic quotient");
    sub->add_option("--M", o.M, "number of admissible degrees carried by w");
    sub->add_option("--tol", o.tol, "residual and volume tolerance");
    sub->add_option("--mode", o.mode, "perturbation degree");
    sub->add_option("--amp", o.amp, "perturbation amplitude");
    sub->add_option("--coeffs", o.coeffs, "perturbation coefficients by degree")->delimiter(',');
    sub->add_option("--eps", o.eps, "finite-difference step");
    sub->add_option("--G", o.G, "functional: linear or projection");
    sub->add_option("--g-coeffs", o.g_coeffs, "functional coefficients")->delimiter(',');
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--samples", o.samples, "calibration samples");
    sub->add_option("--cases", o.cases, "randomized algebra cases");
    sub->add_option("--amplitudes", o.amplitudes, "sweep amplitudes")->delimiter(',');
    sub->add_option("--output", o.output, "report path (stdout when absent)");
    sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  const std::pair<const char*, const char*> commands[] = {
      {"invariants", "space-form curvature invariants and linearization constants"},
      {"verify-algebra", "randomized double-form identities"},
      {"verify-linearization", "finite-difference check of the conformal linearization"},
      {"spectrum", "spectral gap of L on the chosen quotient"},
      {"solve", "Newton solve for constant S^(2k) near the space form"},
      {"solve-g", "Newton solve for a functional of S^(2), ..., S^(2m)"},
      {"kernel-demo", "Jacobian singular values on the even and full sectors"},
      {"sweep", "warm-started solves along a range of amplitudes"},
      {"calibrate", "Kronecker-sum calibration constant"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    common(sub);
    sub->callback([&o, sub] { o.command = sub->get_name(); });
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    detail::require(o.format == "json" || o.command == "solve" || o.command == "solve-g",
                    "--format csv is only available for solve and solve-g");
    const Outcome result = dispatch(o);

    if (o.format == "csv") {
      emit(o, csv_of(result.history), out);
    } else {
      ordered_json report;
      report["schema"] = 1;
      report["command"] = o.command;
      report["inputs"] = inputs_json(o);
      report["kronecker_calibration"] = calibrations_for(o);
      report["result"] = result.result;
      report["exit_code"] = result.code;
      emit(o, report.dump(2) + "\n", out);
    }
    if (result.code == kExitNoConvergence) err << "error: solver did not converge\n";
    return result.code;
  } catch (const InvalidArgument& e) {
    err << "error: invalid parameters: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NondegeneracyViolated& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace gby::cli
