#pragma once

// Model space forms and axisymmetric conformal metrics e^{2 phi} g_mu on S^n
// and RP^n. The base metric is g_mu = (dtheta^2 + sin^2(theta) g_{S^{n-1}})/mu;
// RP^n is modelled by the even-parity sector of functions on S^n.
//
// For mu < 0 there is no closed model. Pointwise quantities (curvature,
// Laplacian, Gauss-Bonnet fields) are then evaluated in the geodesic-ball
// chart (dtheta^2 + sinh^2(theta) g_{S^{n-1}})/|mu|, 0 < theta < pi, which
// is enough for local identities; volumes and solves are unavailable.

#include <optional>
#include <string>

#include "gby/curvature.hpp"
#include "gby/latitude.hpp"

namespace gby {

enum class Quotient { RealProjective, FullSphere, SyntheticHyperbolic };

std::string to_string(Quotient q);

class SpaceForm {
 public:
  static SpaceForm real_projective(int n, double mu);
  static SpaceForm full_sphere(int n, double mu);
  // Compact hyperbolic quotient known only through its first positive
  // Laplace eigenvalue; only the local geodesic-ball chart is discretized.
  static SpaceForm synthetic_hyperbolic(int n, double mu, double first_eigenvalue);

  int dim() const { return n_; }
  double curvature() const { return mu_; }
  Quotient quotient() const { return quotient_; }
  // Volume of the quotient at curvature mu.
  double volume() const { return volume_; }
  Parity parity() const { return quotient_ == Quotient::RealProjective ? Parity::Even : Parity::Unrestricted; }
  // True for S^n and RP^n, which are discretized globally.
  bool is_closed_model() const { return quotient_ != Quotient::SyntheticHyperbolic; }
  std::optional<double> first_eigenvalue() const { return lambda1_; }

 private:
  SpaceForm(int n, double mu, Quotient q, std::optional<double> lambda1);

  int n_;
  double mu_;
  Quotient quotient_;
  double volume_ = 0.0;
  std::optional<double> lambda1_;
};

class ConformalMetric {
 public:
  // The metric e^{2 phi} g_mu. The parity of phi must match the quotient.
  ConformalMetric(SpaceForm base, LatitudeField phi);

  const SpaceForm& base() const { return base_; }
  const LatitudeField& phi() const { return phi_; }
  const GridPtr& grid() const { return phi_.grid(); }

 private:
  SpaceForm base_;
  LatitudeField phi_;
};

// Value and first two theta-derivatives of phi at one point.
struct LatitudeJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

// Curvature of e^{2 phi} g_mu at a point of latitude theta, in a frame
// orthonormal for the conformal metric (e_0 radial). Computed from the
// conformal change law R' = e^{2 phi}(R - g * T),
// T = Hess phi - dphi (x) dphi + |dphi|^2 g / 2.
CurvatureLike conformal_curvature_at(int n, double mu, const LatitudeJet& phi, double theta);

// Same curvature from the warped-product form ds^2 + h(s)^2 g_{S^{n-1}}:
// radial planes have curvature -h''/h, tangential planes (1 - h'^2)/h^2.
CurvatureLike warped_curvature_at(int n, double mu, const LatitudeJet& phi, double theta);

// Sectional curvatures (radial, tangential) of the warped-product form.
std::pair<double, double> warped_sectional_curvatures(double mu, const LatitudeJet& phi, double theta);

CurvatureLike conformal_curvature(const ConformalMetric& cm, int node);
CurvatureLike warped_curvature(const ConformalMetric& cm, int node);

// S^(2k) of e^{2 phi} g_mu at every grid node.
NodalField gb_field(const ConformalMetric& cm, int k);

// All Gauss-Bonnet curvatures S^(2), ..., S^(2 kmax) at every node; column
// j holds S^(2(j+1)).
Eigen::MatrixXd gb_fields(const ConformalMetric& cm, int kmax);

double volume(const ConformalMetric& cm);

// Laplacian of g_mu (geometer's sign, nonnegative spectrum); on closed
// models diagonal in the basis with eigenvalue l(l+n-1) mu. In the
// hyperbolic chart the nodal result is interpolated.
LatitudeField laplacian(const SpaceForm& sf, const LatitudeField& f);
// The same operator from -|mu| (f'' + (n-1) (sn'/sn)(theta) f') on the grid.
Eigen::VectorXd laplacian_nodal(const SpaceForm& sf, const LatitudeField& f);

// Laplacian of e^{2 phi} g_mu applied to f, at the nodes.
Eigen::VectorXd conformal_laplacian_nodal(const ConformalMetric& cm, const LatitudeField& f);

struct SpectralGap {
  double lambda1 = 0.0;
  double n_mu = 0.0;
  bool pass = false;  // lambda1 > n mu: Delta - n mu has trivial kernel
};

SpectralGap spectrum_gap_check(const SpaceForm& sf);

}  // namespace gby
