#pragma once

// Random generators and brute-force oracles shared by the unit tests and the
// acceptance runner. Nothing here calls into the code paths it checks: the
// oracles work from definitions on raw index tuples.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "gby/yamabe_newton.hpp"

namespace gby::testing {

inline double uniform(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

inline double rel_err(double got, double want) {
  return want == 0.0 ? std::abs(got) : std::abs(got - want) / std::abs(want);
}

inline DoubleForm random_form(int n, int p, int q, std::mt19937_64& rng) {
  DoubleForm w(n, p, q);
  for (double& c : w.coeffs()) c = uniform(rng);
  return w;
}

// Random element of C^p: average of a random form and its block transpose.
inline DoubleForm random_symmetric(int n, int p, std::mt19937_64& rng) {
  const DoubleForm w = random_form(n, p, p, rng);
  DoubleForm s(n, p, p);
  const auto& table = SubsetTable::get(n);
  for (IndexMask a : table.subsets(p))
    for (IndexMask b : table.subsets(p)) s(a, b) = 0.5 * (w(a, b) + w(b, a));
  return s;
}

inline Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

// Well-conditioned positive-definite Gram matrix.
inline Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng) {
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = uniform(rng, -0.5, 0.5);
  return a * a.transpose() + Eigen::MatrixXd::Identity(n, n);
}

// Analytic random field with geometrically decaying coefficients, rescaled to sup norm `sup`.
inline LatitudeField random_field(const GridPtr& grid, int max_degree, Parity parity, double sup,
                                  std::mt19937_64& rng) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(max_degree + 1);
  for (int l = 0; l <= max_degree; ++l)
    if (parity == Parity::Unrestricted || l % 2 == 0) c[l] = uniform(rng) * std::pow(0.6, l);
  LatitudeField f(grid, c, parity);
  const double s = f.values().cwiseAbs().maxCoeff();
  return (s > 0.0 ? sup / s : 1.0) * f;
}

// ---------------------------------------------------------------------------
// Double-form oracles on raw index tuples.

inline int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[p[i]]);
      sign = -sign;
    }
  return sign;
}

// Exterior product in each factor from the permutation-sum definition
// (a ^ b)(v_1..v_{p+r}) = 1/(p! r!) sum_sigma sgn(sigma) a(v_sigma(1..p)) b(v_sigma(p+1..)).
inline DoubleForm product_oracle(const DoubleForm& a, const DoubleForm& b) {
  const int n = a.dim(), p = a.p(), q = a.q(), r = b.p(), s = b.q();
  DoubleForm out(n, p + r, q + s);
  const auto& table = SubsetTable::get(n);
  const double norm = factorial(p) * factorial(r) * factorial(q) * factorial(s);
  for (IndexMask I : table.subsets(p + r)) {
    const std::vector<int> rows = mask_to_indices(I);
    for (IndexMask J : table.subsets(q + s)) {
      const std::vector<int> cols = mask_to_indices(J);
      std::vector<int> sr(rows.size());
      std::iota(sr.begin(), sr.end(), 0);
      double total = 0.0;
      do {
        std::vector<int> ra, rb;
        for (int i = 0; i < p + r; ++i) (i < p ? ra : rb).push_back(rows[sr[i]]);
        std::vector<int> sc(cols.size());
        std::iota(sc.begin(), sc.end(), 0);
        do {
          std::vector<int> ca, cb;
          for (int j = 0; j < q + s; ++j) (j < q ? ca : cb).push_back(cols[sc[j]]);
          total += permutation_sign(sr) * permutation_sign(sc) * a.evaluate(ra, ca) * b.evaluate(rb, cb);
        } while (std::next_permutation(sc.begin(), sc.end()));
      } while (std::next_permutation(sr.begin(), sr.end()));
      out(I, J) = total / norm;
    }
  }
  return out;
}

// c_g w in coordinates: sum_{a,b} (G^{-1})_{ab} w(b_a ^ ., b_b ^ .).
inline DoubleForm contraction_oracle(const Eigen::MatrixXd& gram, const DoubleForm& w) {
  const int n = w.dim();
  const Eigen::MatrixXd ginv = gram.inverse();
  DoubleForm out(n, w.p() - 1, w.q() - 1);
  const auto& table = SubsetTable::get(n);
  for (IndexMask I : table.subsets(w.p() - 1))
    for (IndexMask J : table.subsets(w.q() - 1)) {
      double total = 0.0;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          std::vector<int> rows{a}, cols{b};
          for (int i : mask_to_indices(I)) rows.push_back(i);
          for (int j : mask_to_indices(J)) cols.push_back(j);
          total += ginv(a, b) * w.evaluate(rows, cols);
        }
      out(I, J) = total;
    }
  return out;
}

// Scalar curvature as the full double trace sum_{i,j} R(e_i e_j, e_i e_j).
inline double scalar_curvature_oracle(const DoubleForm& R) {
  double s = 0.0;
  for (int i = 0; i < R.dim(); ++i)
    for (int j = 0; j < R.dim(); ++j) {
      const std::vector<int> ij{i, j};
      s += R.evaluate(ij, ij);
    }
  return s;
}

// Classical Ricci tensor as a single trace, Ric(a,b) = sum_i R(e_i e_a, e_i e_b).
inline Eigen::MatrixXd ricci_oracle(const DoubleForm& R) {
  const int n = R.dim();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int i = 0; i < n; ++i) {
        const std::vector<int> r{i, a}, c{i, b};
        ric(a, b) += R.evaluate(r, c);
      }
  return ric;
}

// ---------------------------------------------------------------------------
// Closed forms.

inline double gauss_bonnet_closed_form(int n, int k, double mu) {
  return factorial(n) / (factorial(n - 2 * k) * std::pow(2.0, k)) * std::pow(mu, k);
}

inline double ricci_closed_form(int n, int k, double mu) {
  return factorial(n - 1) * factorial(2 * k) / (factorial(n - 2 * k) * std::pow(2.0, k)) * std::pow(mu, k);
}

// Volume of the round n-sphere of curvature mu.
inline double sphere_volume(int n, double mu) {
  return 2.0 * std::pow(M_PI, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1)) * std::pow(mu, -0.5 * n);
}

// int_0^pi cos^{2m}(t) sin^{n-1}(t) dt = B(m + 1/2, n/2).
inline double latitude_moment(int n, int m) { return std::beta(m + 0.5, 0.5 * n); }

// Gegenbauer C_l^lambda for l <= 3 from explicit polynomials, normalized to 1 at x = 1.
inline double gegenbauer_low(double lambda, int l, double x) {
  double c = 0.0, c1 = 0.0;
  switch (l) {
    case 0: c = 1.0; c1 = 1.0; break;
    case 1: c = 2 * lambda * x; c1 = 2 * lambda; break;
    case 2:
      c = 2 * lambda * (lambda + 1) * x * x - lambda;
      c1 = 2 * lambda * (lambda + 1) - lambda;
      break;
    case 3: {
      const double a = 4.0 / 3.0 * lambda * (lambda + 1) * (lambda + 2);
      const double b = 2 * lambda * (lambda + 1);
      c = a * x * x * x - b * x;
      c1 = a - b;
      break;
    }
    default: break;
  }
  return c / c1;
}

}  // namespace gby::testing
