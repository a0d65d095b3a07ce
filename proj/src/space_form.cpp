#include "gby/space_form.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gby/error.hpp"

namespace gby {

std::string to_string(Quotient q) {
  switch (q) {
    case Quotient::RealProjective: return "real_projective";
    case Quotient::FullSphere: return "full_sphere";
    case Quotient::SyntheticHyperbolic: return "synthetic_hyperbolic";
  }
  return "unknown";
}

SpaceForm::SpaceForm(int n, double mu, Quotient q, std::optional<double> lambda1)
    : n_(n), mu_(mu), quotient_(q), lambda1_(lambda1) {
  detail::require(n >= 5, "space forms need dimension n >= 5");
  detail::require(n <= kMaxDim, "dimension exceeds supported range");
  detail::require(mu != 0.0 && std::isfinite(mu), "sectional curvature must be finite and nonzero");
  if (q == Quotient::SyntheticHyperbolic) {
    detail::require(mu < 0.0, "hyperbolic space forms need mu < 0");
    detail::require(lambda1 && *lambda1 > 0.0, "hyperbolic space forms need a first eigenvalue > 0");
    // Volume of the compact quotient is not modelled.
    volume_ = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  detail::require(mu > 0.0, "spherical space forms need mu > 0");
  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1)) *
                        std::pow(mu, -0.5 * n);
  volume_ = q == Quotient::RealProjective ? 0.5 * sphere : sphere;
}

SpaceForm SpaceForm::real_projective(int n, double mu) { return {n, mu, Quotient::RealProjective, std::nullopt}; }
SpaceForm SpaceForm::full_sphere(int n, double mu) { return {n, mu, Quotient::FullSphere, std::nullopt}; }
SpaceForm SpaceForm::synthetic_hyperbolic(int n, double mu, double first_eigenvalue) {
  return {n, mu, Quotient::SyntheticHyperbolic, first_eigenvalue};
}

ConformalMetric::ConformalMetric(SpaceForm base, LatitudeField phi) : base_(std::move(base)), phi_(std::move(phi)) {
  detail::require(phi_.grid()->dim() == base_.dim(), "conformal factor lives on a grid of another dimension");
  if (base_.quotient() == Quotient::RealProjective)
    detail::require(phi_.parity() == Parity::Even, "conformal factors on RP^n must have even parity");
}

// ---------------------------------------------------------------------------

namespace {

// Warping function of g_mu = (dtheta^2 + sn(theta)^2 g_{S^{n-1}}) / |mu|
// and its derivative: sin/cos for mu > 0, sinh/cosh for mu < 0.
struct Warp {
  double sn, cs;
};

Warp warp(double mu, double theta) {
  return mu > 0.0 ? Warp{std::sin(theta), std::cos(theta)} : Warp{std::sinh(theta), std::cosh(theta)};
}

void require_finite(const LatitudeJet& j) {
  if (!std::isfinite(j.value) || !std::isfinite(j.d1) || !std::isfinite(j.d2))
    throw InvalidArgument("conformal factor has non-finite derivatives");
}

LatitudeJet jet_at(const ConformalMetric& cm, int node) {
  const auto& grid = *cm.grid();
  detail::require(node >= 0 && node < grid.size(), "grid node out of range");
  const auto& c = cm.phi().coeffs();
  const auto m = c.size();
  return {grid.basis().row(node).head(m).dot(c), grid.basis_dtheta().row(node).head(m).dot(c),
          grid.basis_dtheta2().row(node).head(m).dot(c)};
}

}  // namespace

CurvatureLike conformal_curvature_at(int n, double mu, const LatitudeJet& phi, double theta) {
  require_finite(phi);
  const Warp w = warp(mu, theta);
  const double a = std::abs(mu);
  // Hessian and gradient in a g_mu-orthonormal frame; arclength s = theta / sqrt|mu|.
  const double phi_s2 = a * phi.d1 * phi.d1;
  const double hess_radial = a * phi.d2;
  const double hess_tangent = a * (w.cs / w.sn) * phi.d1;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  t(0, 0) = hess_radial - phi_s2 + 0.5 * phi_s2;
  for (int i = 1; i < n; ++i) t(i, i) = hess_tangent + 0.5 * phi_s2;

  const DoubleForm g = DoubleForm::from_matrix(Eigen::MatrixXd::Identity(n, n));
  DoubleForm r = 0.5 * mu * product(g, g) - product(g, DoubleForm::from_matrix(t));
  // e^{2 phi} from the change law, e^{-4 phi} from renormalizing the frame.
  r *= std::exp(-2.0 * phi.value);
  return CurvatureLike(std::move(r));
}

std::pair<double, double> warped_sectional_curvatures(double mu, const LatitudeJet& phi, double theta) {
  require_finite(phi);
  const Warp w = warp(mu, theta);
  const double sign = mu > 0.0 ? 1.0 : -1.0;
  const double e = std::exp(phi.value);
  const double sq = std::sqrt(std::abs(mu));
  // ds = e^{phi} dtheta / sqrt|mu|, h = e^{phi} sn(theta) / sqrt|mu|, sn'' = -sign sn.
  const double h = e * w.sn / sq;
  const double h1 = phi.d1 * w.sn + w.cs;
  const double h2 = sq / e * (phi.d2 * w.sn + phi.d1 * w.cs - sign * w.sn);
  return {-h2 / h, (1.0 - h1 * h1) / (h * h)};
}

CurvatureLike warped_curvature_at(int n, double mu, const LatitudeJet& phi, double theta) {
  detail::require(theta > 0.0 && (mu < 0.0 || theta < std::numbers::pi), "warped curvature is singular at the poles");
  const auto [radial, tangent] = warped_sectional_curvatures(mu, phi, theta);
  DoubleForm r(n, 2, 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const IndexMask ab = (IndexMask{1} << a) | (IndexMask{1} << b);
      r(ab, ab) = a == 0 ? radial : tangent;
    }
  return CurvatureLike(std::move(r));
}

CurvatureLike conformal_curvature(const ConformalMetric& cm, int node) {
  return conformal_curvature_at(cm.base().dim(), cm.base().curvature(), jet_at(cm, node),
                                cm.grid()->theta()[node]);
}

CurvatureLike warped_curvature(const ConformalMetric& cm, int node) {
  return warped_curvature_at(cm.base().dim(), cm.base().curvature(), jet_at(cm, node), cm.grid()->theta()[node]);
}

Eigen::MatrixXd gb_fields(const ConformalMetric& cm, int kmax) {
  const int n = cm.base().dim();
  detail::require(kmax >= 1 && 2 * kmax <= n, "order out of range");
  const auto& grid = *cm.grid();
  const Eigen::VectorXd v = cm.phi().values(), d1 = cm.phi().d_theta(), d2 = cm.phi().d2_theta();
  const Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd out(grid.size(), kmax);
  for (int j = 0; j < grid.size(); ++j) {
    const CurvatureLike r = conformal_curvature_at(n, cm.base().curvature(), {v[j], d1[j], d2[j]}, grid.theta()[j]);
    DoubleForm rk = r.form();
    for (int k = 1; k <= kmax; ++k) {
      if (k > 1) rk = product(rk, r.form());
      DoubleForm top = rk;
      for (int c = 0; c < 2 * k; ++c) top = contract_in_frame(frame, top);
      out(j, k - 1) = top.coeffs()[0] / factorial(2 * k);
    }
  }
  return out;
}

NodalField gb_field(const ConformalMetric& cm, int k) {
  const int n = cm.base().dim();
  detail::require(k >= 1 && 2 * k < n, "gb_field needs 1 <= k and 2k < n");
  const auto& grid = *cm.grid();
  const Eigen::VectorXd v = cm.phi().values(), d1 = cm.phi().d_theta(), d2 = cm.phi().d2_theta();
  const SymmetricBilinear g = SymmetricBilinear::identity(n);
  NodalField out{cm.grid(), Eigen::VectorXd(grid.size())};
  for (int j = 0; j < grid.size(); ++j) {
    const CurvatureLike r = conformal_curvature_at(n, cm.base().curvature(), {v[j], d1[j], d2[j]}, grid.theta()[j]);
    out.values[j] = gauss_bonnet(r, g, k);
  }
  return out;
}

double volume(const ConformalMetric& cm) {
  const SpaceForm& sf = cm.base();
  detail::require(sf.is_closed_model(), "volume needs a closed space form model");
  const int n = sf.dim();
  const auto& grid = *cm.grid();
  const Eigen::VectorXd density = (n * cm.phi().values().array()).exp().matrix();
  // Transverse sphere S^{n-1} and the radius 1/sqrt(mu).
  const double transverse = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  double vol = transverse * std::pow(sf.curvature(), -0.5 * n) * grid.integrate(density);
  if (sf.quotient() == Quotient::RealProjective) vol *= 0.5;
  return vol;
}

LatitudeField laplacian(const SpaceForm& sf, const LatitudeField& f) {
  if (!sf.is_closed_model()) return LatitudeField::from_values(f.grid(), laplacian_nodal(sf, f), f.grid()->max_degree(), f.parity());
  const int n = sf.dim();
  Eigen::VectorXd c = f.coeffs();
  for (int l = 0; l <= f.max_degree(); ++l) c[l] *= l * (l + n - 1.0) * sf.curvature();
  return LatitudeField(f.grid(), std::move(c), f.parity());
}

Eigen::VectorXd laplacian_nodal(const SpaceForm& sf, const LatitudeField& f) {
  const auto& grid = *f.grid();
  detail::require(grid.dim() == sf.dim(), "field and space form differ in dimension");
  Eigen::VectorXd ct(grid.size());
  for (int j = 0; j < grid.size(); ++j) {
    const Warp w = warp(sf.curvature(), grid.theta()[j]);
    ct[j] = w.cs / w.sn;
  }
  return -std::abs(sf.curvature()) * (f.d2_theta() + (sf.dim() - 1.0) * ct.cwiseProduct(f.d_theta()));
}

Eigen::VectorXd conformal_laplacian_nodal(const ConformalMetric& cm, const LatitudeField& f) {
  detail::require(f.grid()->size() == cm.grid()->size(), "field and metric live on different grids");
  const SpaceForm& sf = cm.base();
  const Eigen::VectorXd base = laplacian_nodal(sf, f);
  const Eigen::VectorXd cross = std::abs(sf.curvature()) * cm.phi().d_theta().cwiseProduct(f.d_theta());
  const Eigen::VectorXd scale = (-2.0 * cm.phi().values().array()).exp().matrix();
  return scale.cwiseProduct(base - (sf.dim() - 2.0) * cross);
}

SpectralGap spectrum_gap_check(const SpaceForm& sf) {
  SpectralGap out;
  out.n_mu = sf.dim() * sf.curvature();
  if (!sf.is_closed_model()) {
    out.lambda1 = *sf.first_eigenvalue();
  } else {
    // Rayleigh quotients of the grid Laplacian on the admissible modes.
    constexpr int kProbeDegree = 8;
    const GridPtr grid = LatitudeGrid::make(sf.dim(), 2 * kProbeDegree + 2);
    out.lambda1 = std::numeric_limits<double>::infinity();
    for (int l = 1; l <= kProbeDegree; ++l) {
      if (sf.parity() == Parity::Even && l % 2 == 1) continue;
      const LatitudeField mode = LatitudeField::mode(grid, l, kProbeDegree, sf.parity());
      const Eigen::VectorXd v = mode.values();
      const double rq = grid->integrate(laplacian_nodal(sf, mode).cwiseProduct(v)) / grid->integrate(v.cwiseAbs2());
      out.lambda1 = std::min(out.lambda1, rq);
    }
  }
  // Strict gap with a rounding margin; on the round sphere lambda1 == n mu.
  out.pass = out.lambda1 - out.n_mu > 1e-9 * std::max(1.0, std::abs(out.n_mu));
  return out;
}

}  // namespace gby
