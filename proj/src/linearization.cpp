#include "gby/linearization.hpp"

#include <cmath>
#include <numeric>

#include "gby/error.hpp"

namespace gby {

LinearizationConstants linearization_constants(int n, int k, double mu) {
  detail::require(k >= 1 && 2 * k < n, "linearization constants need 1 <= k and 2k < n");
  if (mu == 0.0) throw InvalidArgument("linearization constants need mu != 0");
  LinearizationConstants c;
  c.n = n;
  c.k = k;
  c.mu = mu;
  c.C_nk = invariant_constants(n, k).C_nk;
  c.D = (n - 2.0) * k * c.C_nk * std::pow(mu, k - 1) / factorial(2 * k);
  c.Dprime = (n - 1.0) * c.D;
  return c;
}

LatitudeField L_operator(const SpaceForm& sf, const LatitudeField& f) {
  LatitudeField out = laplacian(sf, f);
  LatitudeField shift = f.resized(out.max_degree());
  out += (-sf.dim() * sf.curvature()) * shift;
  return out;
}

LatitudeField conformal_linearization(const SpaceForm& sf, const LatitudeField& f, int k) {
  const auto c = linearization_constants(sf.dim(), k, sf.curvature());
  return c.Dprime * L_operator(sf, f);
}

LatitudeField full_linearization(const SpaceForm& sf, const LatitudeField& tr_h, const LatitudeField& div_div_h,
                                 int k) {
  const auto c = linearization_constants(sf.dim(), k, sf.curvature());
  LatitudeField out = laplacian(sf, tr_h);
  out += div_div_h;
  out += (-(sf.dim() - 1.0) * sf.curvature()) * tr_h;
  return c.D * out;
}

FdVerification fd_verify(const SpaceForm& sf, const LatitudeField& f, int k, double eps) {
  detail::require(eps > 0.0, "finite-difference step must be positive");
  const NodalField plus = gb_field(ConformalMetric(sf, eps * f), k);
  const NodalField minus = gb_field(ConformalMetric(sf, -eps * f), k);

  FdVerification out;
  out.fd = {f.grid(), (plus.values - minus.values) / (2.0 * eps)};
  if (!out.fd.values.allFinite()) throw InvalidArgument("fd_verify: non-finite field values");
  const auto c = linearization_constants(sf.dim(), k, sf.curvature());
  if (sf.is_closed_model()) {
    out.exact = {f.grid(), 2.0 * conformal_linearization(sf, f, k).values()};
  } else {
    out.exact = {f.grid(), 2.0 * c.Dprime * (laplacian_nodal(sf, f) - sf.dim() * sf.curvature() * f.values())};
  }
  const double err = (out.fd.values - out.exact.values).cwiseAbs().maxCoeff();
  const double scale = out.exact.sup_norm();
  out.relerr = scale > 0.0 ? err / scale : err;
  return out;
}

// ---------------------------------------------------------------------------

Functional::Functional(std::string name, int arity, Fn value, Grad gradient)
    : name_(std::move(name)), arity_(arity), value_(std::move(value)), gradient_(std::move(gradient)) {
  detail::require(arity >= 1, "functional needs at least one argument");
}

Functional Functional::projection(int order) {
  detail::require(order >= 1, "projection order must be >= 1");
  std::vector<double> coeffs(order, 0.0);
  coeffs.back() = 1.0;
  Functional g = linear(coeffs);
  g.name_ = "projection";
  return g;
}

Functional Functional::linear(std::vector<double> coeffs) {
  detail::require(!coeffs.empty(), "linear functional needs coefficients");
  const int m = static_cast<int>(coeffs.size());
  Functional g(
      "linear", m,
      [coeffs](std::span<const double> x) { return std::inner_product(coeffs.begin(), coeffs.end(), x.begin(), 0.0); },
      [coeffs](std::span<const double>) { return coeffs; });
  g.linear_ = std::move(coeffs);
  return g;
}

int max_order_below_half(int n) { return (n - 1) / 2; }

GeneralizedConstants generalized_constants(const SpaceForm& sf, const Functional& G) {
  const int n = sf.dim();
  const int kn = max_order_below_half(n);
  detail::require(G.arity() <= kn, "functional depends on S^(2k) with 2k >= n");
  GeneralizedConstants out;
  for (int j = 1; j <= G.arity(); ++j) out.space_form_values.push_back(space_form_gauss_bonnet(n, j, sf.curvature()));
  out.partials = G.gradient(out.space_form_values);
  detail::require(static_cast<int>(out.partials.size()) == G.arity(), "functional gradient has the wrong size");
  out.value = G(out.space_form_values);

  double magnitude = 0.0;
  for (int j = 1; j <= G.arity(); ++j) {
    const double term = linearization_constants(n, j, sf.curvature()).D * out.partials[j - 1];
    out.D += term;
    magnitude += std::abs(term);
  }
  if (!(std::abs(out.D) > 1e-12 * magnitude))
    throw NondegeneracyViolated("functional " + G.name() + " violates the nondegeneracy condition D_G != 0");
  out.Dprime = (n - 1.0) * out.D;
  return out;
}

LatitudeField generalized_linearization(const SpaceForm& sf, const LatitudeField& f, const Functional& G) {
  return generalized_constants(sf, G).Dprime * L_operator(sf, f);
}

NodalField proof_functional(const ConformalMetric& cm, int k) {
  const NodalField s = gb_field(cm, k);
  const GridPtr& grid = cm.grid();
  // Interpolate S on all nodes so that it can be differentiated spectrally.
  const LatitudeField s_field = s.project(grid->max_degree(), Parity::Unrestricted);
  Eigen::VectorXd lap = conformal_laplacian_nodal(cm, s_field);
  lap.array() -= grid->mean(lap);
  return {grid, lap};
}

}  // namespace gby
