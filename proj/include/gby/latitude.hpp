#pragma once

// Spectral representation of axisymmetric functions on S^n. A function of
// the polar angle theta is expanded in Gegenbauer polynomials
// C_l^{(n-1)/2}(cos theta), normalized to equal 1 at the pole, and sampled
// at Gauss nodes for the weight sin^{n-1}(theta) (poles excluded).

#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace gby {

enum class Parity {
  Even,          // invariant under theta -> pi - theta; only even degrees
  Unrestricted,
};

// Normalized Gegenbauer polynomial P_l(x) = C_l^lambda(x) / C_l^lambda(1)
// and its first two x-derivatives, for l = 0..max_degree.
struct GegenbauerTable {
  Eigen::VectorXd value;
  Eigen::VectorXd d1;
  Eigen::VectorXd d2;
};
GegenbauerTable gegenbauer(double lambda, int max_degree, double x);

// Gauss nodes in x = cos(theta) for the weight (1 - x^2)^{lambda - 1/2}.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
GaussRule gauss_gegenbauer(double lambda, int count);

class LatitudeGrid {
 public:
  LatitudeGrid(int n, int nodes);
  static std::shared_ptr<const LatitudeGrid> make(int n, int nodes);

  int dim() const { return n_; }
  int size() const { return static_cast<int>(x_.size()); }
  double lambda() const { return 0.5 * (n_ - 1); }
  // Largest degree a field may carry on this grid.
  int max_degree() const { return size() - 1; }

  const Eigen::VectorXd& cos_theta() const { return x_; }
  const Eigen::VectorXd& sin_theta() const { return sin_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  // sum_j weights[j] f(theta_j) ~ int_0^pi f(theta) sin^{n-1}(theta) dtheta.
  const Eigen::VectorXd& weights() const { return w_; }
  double total_weight() const { return w_.sum(); }

  // Basis values and theta-derivatives, nodes x degrees (0..max_degree()).
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& basis_dtheta() const { return basis_t_; }
  const Eigen::MatrixXd& basis_dtheta2() const { return basis_tt_; }
  // Quadrature norms int P_l^2 sin^{n-1}.
  const Eigen::VectorXd& norms() const { return norms_; }

  double integrate(const Eigen::VectorXd& values) const { return w_.dot(values); }
  double mean(const Eigen::VectorXd& values) const { return integrate(values) / total_weight(); }

 private:
  int n_;
  Eigen::VectorXd x_, sin_, theta_, w_;
  Eigen::MatrixXd basis_, basis_t_, basis_tt_;
  Eigen::VectorXd norms_;
};

using GridPtr = std::shared_ptr<const LatitudeGrid>;

class LatitudeField {
 public:
  LatitudeField(GridPtr grid, Eigen::VectorXd coeffs, Parity parity);

  static LatitudeField zero(GridPtr grid, int max_degree, Parity parity);
  static LatitudeField constant(GridPtr grid, int max_degree, Parity parity, double value);
  // amplitude * P_l.
  static LatitudeField mode(GridPtr grid, int degree, int max_degree, Parity parity, double amplitude = 1.0);
  // Quadrature projection of nodal values onto degrees 0..max_degree.
  static LatitudeField from_values(GridPtr grid, const Eigen::VectorXd& values, int max_degree, Parity parity);

  const GridPtr& grid() const { return grid_; }
  Parity parity() const { return parity_; }
  int max_degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  double coeff(int degree) const { return degree <= max_degree() ? coeffs_[degree] : 0.0; }

  Eigen::VectorXd values() const;
  Eigen::VectorXd d_theta() const;
  Eigen::VectorXd d2_theta() const;

  // Same coefficients sampled on another grid of the same dimension.
  LatitudeField on_grid(GridPtr grid) const;
  // Zero-padded or truncated to a new maximal degree.
  LatitudeField resized(int max_degree) const;
  // f(theta) -> f(pi - theta).
  LatitudeField reflected() const;

  LatitudeField& operator+=(const LatitudeField& o);
  LatitudeField& operator*=(double s);
  friend LatitudeField operator+(LatitudeField a, const LatitudeField& b) { return a += b; }
  friend LatitudeField operator*(double s, LatitudeField a) { return a *= s; }

 private:
  GridPtr grid_;
  Eigen::VectorXd coeffs_;
  Parity parity_;
};

// Values at the nodes of a grid, e.g. a curvature evaluated pointwise.
struct NodalField {
  GridPtr grid;
  Eigen::VectorXd values;

  double mean() const { return grid->mean(values); }
  double sup_norm() const { return values.cwiseAbs().maxCoeff(); }
  double variation() const { return values.maxCoeff() - values.minCoeff(); }
  LatitudeField project(int max_degree, Parity parity) const {
    return LatitudeField::from_values(grid, values, max_degree, parity);
  }
};

}  // namespace gby
