#pragma once

// Gauss-Bonnet curvatures S^(2k) = c_g^{2k} R^k / (2k)!, the 2k-Ricci tensor
// c_g^{2k-1} R^k, and the generalized-Kronecker-delta formula used as an
// independent oracle.

#include <cstdint>
#include <random>
#include <span>

#include "gby/double_form.hpp"

namespace gby {

struct InvariantConstants {
  int n = 0;
  int k = 0;
  double C_nk = 0.0;      // (2k)!(n-3)! / (2^k (n-2k)!)
  double lambda_k = 0.0;  // (2k)!(n-1)! / (2^k (n-2k)!)
};

InvariantConstants invariant_constants(int n, int k);

double gauss_bonnet(const CurvatureLike& R, const SymmetricBilinear& g, int k);
SymmetricBilinear ricci_2k(const CurvatureLike& R, const SymmetricBilinear& g, int k);

// Closed forms at constant sectional curvature mu.
double space_form_gauss_bonnet(int n, int k, double mu);
double space_form_ricci_coefficient(int n, int k, double mu);

// Sum over ordered 2k-tuples of the generalized Kronecker delta times the
// product of k orthonormal-frame curvature components, without any prefactor.
double kronecker_sum(const CurvatureLike& R, int k);
double gauss_bonnet_kronecker(const CurvatureLike& R, int k, double c_nk);

inline constexpr int kKroneckerMaxDim = 7;

struct KroneckerCalibration {
  int n = 0;
  int k = 0;
  double value = 0.0;            // mean ratio gauss_bonnet / kronecker_sum
  double relative_spread = 0.0;  // (max - min) / |mean| over samples
  int samples_used = 0;
  int samples_skipped = 0;
  std::uint64_t seed = 0;
};

// Fits c_{n,k} from random C^2 samples. Throws ConventionError when the ratio
// is not constant to 1e-10 relative.
KroneckerCalibration calibrate_kronecker_constant(int n, int k, int samples, std::uint64_t seed = 20240611);

// Process-wide cache of calibrate_kronecker_constant(n, k, 10).
KroneckerCalibration cached_kronecker_constant(int n, int k);

// R = (mu/2) g^2 for the standard metric on R^n.
CurvatureLike space_form_curvature(int n, double mu);

// Gauss equation for a hypersurface in Euclidean space, R = A^2 / 2, with the
// shape operator A diagonal with the given principal curvatures.
CurvatureLike gauss_equation_curvature(std::span<const double> principal_curvatures);

double elementary_symmetric(std::span<const double> x, int order);

struct HypersurfaceCheck {
  double gauss_bonnet = 0.0;
  double sigma = 0.0;  // sigma_{2k} of the principal curvatures
  double ratio = 0.0;
};

// Round sphere of radius r in R^{n+1}: all principal curvatures 1/r.
HypersurfaceCheck hypersurface_sigma_check(int n, double r, int k);

// Random element of C^2 with coefficients in [-1, 1]; first Bianchi is not imposed.
CurvatureLike random_curvature_like(int n, std::mt19937_64& rng);

}  // namespace gby
