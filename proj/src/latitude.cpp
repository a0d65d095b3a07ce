#include "gby/latitude.hpp"

#include <cmath>
#include <numbers>

#include "gby/error.hpp"

namespace gby {

namespace {

// Unnormalized C_l^lambda(x) for l = 0..max_degree (empty tail when max_degree < 0).
Eigen::VectorXd gegenbauer_raw(double lambda, int max_degree, double x) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(std::max(max_degree + 1, 0));
  if (max_degree < 0) return c;
  c[0] = 1.0;
  if (max_degree >= 1) c[1] = 2.0 * lambda * x;
  for (int l = 1; l < max_degree; ++l)
    c[l + 1] = (2.0 * x * (l + lambda) * c[l] - (l + 2.0 * lambda - 1.0) * c[l - 1]) / (l + 1.0);
  return c;
}

// log of int_{-1}^{1} (C_l^lambda)^2 (1-x^2)^{lambda-1/2} dx.
double log_norm(double lambda, int l) {
  return std::log(std::numbers::pi) + (1.0 - 2.0 * lambda) * std::log(2.0) + std::lgamma(l + 2.0 * lambda) -
         std::lgamma(l + 1.0) - std::log(l + lambda) - 2.0 * std::lgamma(lambda);
}

}  // namespace

GegenbauerTable gegenbauer(double lambda, int max_degree, double x) {
  detail::require(lambda > 0.0, "Gegenbauer parameter must be positive");
  const Eigen::VectorXd c0 = gegenbauer_raw(lambda, max_degree, x);
  const Eigen::VectorXd c1 = gegenbauer_raw(lambda + 1.0, max_degree - 1, x);
  const Eigen::VectorXd c2 = gegenbauer_raw(lambda + 2.0, max_degree - 2, x);
  const Eigen::VectorXd at_pole = gegenbauer_raw(lambda, max_degree, 1.0);

  GegenbauerTable t{Eigen::VectorXd::Zero(max_degree + 1), Eigen::VectorXd::Zero(max_degree + 1),
                    Eigen::VectorXd::Zero(max_degree + 1)};
  for (int l = 0; l <= max_degree; ++l) {
    t.value[l] = c0[l] / at_pole[l];
    if (l >= 1) t.d1[l] = 2.0 * lambda * c1[l - 1] / at_pole[l];
    if (l >= 2) t.d2[l] = 4.0 * lambda * (lambda + 1.0) * c2[l - 2] / at_pole[l];
  }
  return t;
}

GaussRule gauss_gegenbauer(double lambda, int count) {
  detail::require(count >= 1, "quadrature needs at least one node");
  // Golub-Welsch on the symmetric Jacobi matrix of the monic recurrence.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(count, count);
  for (int j = 1; j < count; ++j) {
    const double b = std::sqrt(j * (j + 2.0 * lambda - 1.0) / (4.0 * (j + lambda) * (j + lambda - 1.0)));
    jac(j, j - 1) = b;
    jac(j - 1, j) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  Eigen::VectorXd x = eig.eigenvalues();

  GaussRule rule{x, Eigen::VectorXd(count)};
  for (int i = 0; i < count; ++i) {
    // Newton polish on C_count^lambda, then Christoffel weights from the
    // orthonormal polynomials.
    double xi = x[i];
    for (int it = 0; it < 3; ++it) {
      const Eigen::VectorXd c = gegenbauer_raw(lambda, count, xi);
      const Eigen::VectorXd d = gegenbauer_raw(lambda + 1.0, count - 1, xi);
      const double step = c[count] / (2.0 * lambda * d[count - 1]);
      xi -= step;
      if (std::abs(step) < 1e-17) break;
    }
    rule.nodes[i] = xi;
    const Eigen::VectorXd c = gegenbauer_raw(lambda, count - 1, xi);
    double s = 0.0;
    for (int l = 0; l < count; ++l) s += c[l] * c[l] * std::exp(-log_norm(lambda, l));
    rule.weights[i] = 1.0 / s;
  }
  return rule;
}

LatitudeGrid::LatitudeGrid(int n, int nodes) : n_(n) {
  detail::require(n >= 2, "latitude grids need n >= 2");
  const GaussRule rule = gauss_gegenbauer(lambda(), nodes);
  x_ = rule.nodes;
  w_ = rule.weights;
  sin_.resize(nodes);
  theta_.resize(nodes);
  for (int j = 0; j < nodes; ++j) {
    sin_[j] = std::sqrt((1.0 - x_[j]) * (1.0 + x_[j]));
    theta_[j] = std::atan2(sin_[j], x_[j]);
  }

  const int deg = max_degree();
  basis_.resize(nodes, deg + 1);
  basis_t_.resize(nodes, deg + 1);
  basis_tt_.resize(nodes, deg + 1);
  for (int j = 0; j < nodes; ++j) {
    const GegenbauerTable t = gegenbauer(lambda(), deg, x_[j]);
    const double s = sin_[j], c = x_[j];
    // d/dtheta = -sin d/dx;  d2/dtheta2 = sin^2 d2/dx2 - cos d/dx.
    basis_.row(j) = t.value.transpose();
    basis_t_.row(j) = (-s * t.d1).transpose();
    basis_tt_.row(j) = (s * s * t.d2 - c * t.d1).transpose();
  }
  norms_ = basis_.cwiseAbs2().transpose() * w_;
}

std::shared_ptr<const LatitudeGrid> LatitudeGrid::make(int n, int nodes) {
  return std::make_shared<const LatitudeGrid>(n, nodes);
}

// ---------------------------------------------------------------------------

LatitudeField::LatitudeField(GridPtr grid, Eigen::VectorXd coeffs, Parity parity)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)), parity_(parity) {
  detail::require(grid_ != nullptr, "latitude field needs a grid");
  detail::require(coeffs_.size() >= 1, "latitude field needs at least one coefficient");
  detail::require(max_degree() <= grid_->max_degree(), "field degree exceeds what the grid resolves");
  detail::require(coeffs_.allFinite(), "latitude field coefficients must be finite");
  if (parity_ == Parity::Even)
    for (int l = 1; l <= max_degree(); l += 2)
      detail::require(coeffs_[l] == 0.0, "even-parity field has a nonzero odd-degree coefficient");
}

LatitudeField LatitudeField::zero(GridPtr grid, int max_degree, Parity parity) {
  detail::require(max_degree >= 0, "negative maximal degree");
  return LatitudeField(std::move(grid), Eigen::VectorXd::Zero(max_degree + 1), parity);
}

LatitudeField LatitudeField::constant(GridPtr grid, int max_degree, Parity parity, double value) {
  LatitudeField f = zero(std::move(grid), max_degree, parity);
  f.coeffs_[0] = value;
  return f;
}

LatitudeField LatitudeField::mode(GridPtr grid, int degree, int max_degree, Parity parity, double amplitude) {
  detail::require(degree >= 0 && degree <= max_degree, "mode degree outside [0, max_degree]");
  detail::require(parity == Parity::Unrestricted || degree % 2 == 0, "odd mode in an even-parity field");
  LatitudeField f = zero(std::move(grid), max_degree, parity);
  f.coeffs_[degree] = amplitude;
  return f;
}

LatitudeField LatitudeField::from_values(GridPtr grid, const Eigen::VectorXd& values, int max_degree, Parity parity) {
  detail::require(values.size() == grid->size(), "nodal values do not match grid size");
  detail::require(max_degree >= 0 && max_degree <= grid->max_degree(), "projection degree exceeds grid");
  const auto& b = grid->basis();
  Eigen::VectorXd c(max_degree + 1);
  const Eigen::VectorXd wv = grid->weights().cwiseProduct(values);
  for (int l = 0; l <= max_degree; ++l) {
    c[l] = (parity == Parity::Even && l % 2 == 1) ? 0.0 : b.col(l).dot(wv) / grid->norms()[l];
  }
  return LatitudeField(std::move(grid), std::move(c), parity);
}

Eigen::VectorXd LatitudeField::values() const { return grid_->basis().leftCols(coeffs_.size()) * coeffs_; }
Eigen::VectorXd LatitudeField::d_theta() const { return grid_->basis_dtheta().leftCols(coeffs_.size()) * coeffs_; }
Eigen::VectorXd LatitudeField::d2_theta() const {
  return grid_->basis_dtheta2().leftCols(coeffs_.size()) * coeffs_;
}

LatitudeField LatitudeField::on_grid(GridPtr grid) const {
  detail::require(grid->dim() == grid_->dim(), "grids of different dimensions");
  return LatitudeField(std::move(grid), coeffs_, parity_);
}

LatitudeField LatitudeField::resized(int max_degree) const {
  detail::require(max_degree >= 0, "negative maximal degree");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(max_degree + 1);
  const int keep = std::min(max_degree, this->max_degree());
  c.head(keep + 1) = coeffs_.head(keep + 1);
  return LatitudeField(grid_, std::move(c), parity_);
}

LatitudeField LatitudeField::reflected() const {
  Eigen::VectorXd c = coeffs_;
  for (int l = 1; l <= max_degree(); l += 2) c[l] = -c[l];
  return LatitudeField(grid_, std::move(c), parity_);
}

LatitudeField& LatitudeField::operator+=(const LatitudeField& o) {
  detail::require(grid_ == o.grid_ || (grid_->dim() == o.grid_->dim() && grid_->size() == o.grid_->size()),
                  "fields live on different grids");
  if (o.max_degree() > max_degree()) *this = resized(o.max_degree());
  coeffs_.head(o.coeffs_.size()) += o.coeffs_;
  if (o.parity_ == Parity::Unrestricted) parity_ = Parity::Unrestricted;
  return *this;
}

LatitudeField& LatitudeField::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

}  // namespace gby
