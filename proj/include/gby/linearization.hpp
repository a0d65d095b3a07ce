#pragma once

// Linearization of g -> S^(2k)_g at a space form g_mu. In conformal
// directions h = f g_mu it reduces to D' (Delta - n mu) f with
//
//   C_{n,k} = (2k)!(n-3)! / (2^k (n-2k)!),
//   D_{n,k,mu} = (n-2) k C_{n,k} mu^{k-1} / (2k)!,   D' = (n-1) D.

#include <functional>
#include <string>
#include <vector>

#include "gby/space_form.hpp"

namespace gby {

struct LinearizationConstants {
  int n = 0;
  int k = 0;
  double mu = 0.0;
  double C_nk = 0.0;
  double D = 0.0;
  double Dprime = 0.0;
};

LinearizationConstants linearization_constants(int n, int k, double mu);

// L = Delta - n mu.
LatitudeField L_operator(const SpaceForm& sf, const LatitudeField& f);

// Derivative of S^(2k) at g_mu in the direction f g_mu: D' L f.
LatitudeField conformal_linearization(const SpaceForm& sf, const LatitudeField& f, int k);

// D (Delta tr h + delta delta h - (n-1) mu tr h) for caller-supplied scalar
// fields tr_g h and delta delta h (divergence with the sign -sum nabla_i h_i.).
LatitudeField full_linearization(const SpaceForm& sf, const LatitudeField& tr_h, const LatitudeField& div_div_h,
                                 int k);

struct FdVerification {
  NodalField fd;
  NodalField exact;
  double relerr = 0.0;
};

// Central difference of S^(2k) along t -> e^{2 t f} g_mu (so h = 2 f g_mu)
// against 2 D' L f at the grid nodes. relerr is the sup-norm error relative
// to the sup norm of the exact field (absolute when that vanishes).
FdVerification fd_verify(const SpaceForm& sf, const LatitudeField& f, int k, double eps = 1e-3);

// Smooth G(x_1, ..., x_m) of the Gauss-Bonnet curvatures x_j = S^(2j).
class Functional {
 public:
  using Fn = std::function<double(std::span<const double>)>;
  using Grad = std::function<std::vector<double>(std::span<const double>)>;

  Functional(std::string name, int arity, Fn value, Grad gradient);

  // G = x_order.
  static Functional projection(int order);
  // G = sum_j coeffs[j] x_{j+1}.
  static Functional linear(std::vector<double> coeffs);

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }
  double operator()(std::span<const double> x) const { return value_(x); }
  std::vector<double> gradient(std::span<const double> x) const { return gradient_(x); }
  // Coefficients when built by linear() or projection().
  const std::vector<double>& linear_coeffs() const { return linear_; }

 private:
  std::string name_;
  int arity_;
  Fn value_;
  Grad gradient_;
  std::vector<double> linear_;
};

// Largest integer strictly below n/2.
int max_order_below_half(int n);

struct GeneralizedConstants {
  std::vector<double> space_form_values;  // S^(2j)(g_mu), j = 1..arity
  std::vector<double> partials;           // dG/dx_j at those values
  double value = 0.0;                     // G at the space form
  double D = 0.0;                         // sum_j D_{n,j,mu} dG/dx_j
  double Dprime = 0.0;
};

// Throws NondegeneracyViolated when D vanishes.
GeneralizedConstants generalized_constants(const SpaceForm& sf, const Functional& G);

// D'_G L f.
LatitudeField generalized_linearization(const SpaceForm& sf, const LatitudeField& f, const Functional& G);

// Delta_g S^(2k)_g minus its g_mu-mean, for g = e^{2 phi} g_mu; vanishes
// exactly when S^(2k)_g is constant.
NodalField proof_functional(const ConformalMetric& cm, int k);

}  // namespace gby
