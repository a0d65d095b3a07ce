#pragma once

// Pointwise algebra of double forms over an n-dimensional inner-product
// space. A (p,q) double form is stored densely by pairs (I,J) of strictly
// increasing multi-indices, |I| = p, |J| = q, which enforces antisymmetry
// within each factor. Coefficients are values on basis vectors:
//
//   coeff(I, J) = w(b_{i1} ^ ... ^ b_{ip}  (x)  b_{j1} ^ ... ^ b_{jq}).
//
// The product is the exterior product applied separately in each factor,
// without factorial weights, so that (g*g)(ij,ij) = 2 for an orthonormal
// basis and R = (mu/2) g^2 has sectional curvature mu.

#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gby/combinatorics.hpp"

namespace gby {

class DoubleForm {
 public:
  DoubleForm() = default;
  // Zero form of bidegree (p,q) over R^dim.
  DoubleForm(int dim, int p, int q);

  static DoubleForm scalar(int dim, double value);
  // (1,1) form with coeff(i,j) = m(i,j).
  static DoubleForm from_matrix(const Eigen::MatrixXd& m);

  int dim() const { return dim_; }
  int p() const { return p_; }
  int q() const { return q_; }
  bool is_square() const { return p_ == q_; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  double operator()(IndexMask row, IndexMask col) const;
  double& operator()(IndexMask row, IndexMask col);

  // Access by increasing index lists, e.g. at({0, 2}, {1, 2}).
  double at(std::initializer_list<int> row, std::initializer_list<int> col) const;
  void set(std::initializer_list<int> row, std::initializer_list<int> col, double v);

  // Value on arbitrary (possibly unsorted, possibly repeated) basis tuples,
  // with the antisymmetry sign applied.
  double evaluate(std::span<const int> row, std::span<const int> col) const;

  // Entries of a (1,1) form as a dense matrix.
  Eigen::MatrixXd to_matrix() const;

  double max_abs() const;

  DoubleForm& operator+=(const DoubleForm& o);
  DoubleForm& operator-=(const DoubleForm& o);
  DoubleForm& operator*=(double s);

  friend DoubleForm operator+(DoubleForm a, const DoubleForm& b) { return a += b; }
  friend DoubleForm operator-(DoubleForm a, const DoubleForm& b) { return a -= b; }
  friend DoubleForm operator*(DoubleForm a, double s) { return a *= s; }
  friend DoubleForm operator*(double s, DoubleForm a) { return a *= s; }

 private:
  std::size_t index(IndexMask row, IndexMask col) const;
  void require_same_shape(const DoubleForm& o) const;

  int dim_ = 0;
  int p_ = 0;
  int q_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> coeffs_;
};

// Symmetric (1,1) form, element of C^1. Used for metrics and perturbations.
class SymmetricBilinear {
 public:
  explicit SymmetricBilinear(DoubleForm form, double tol = 0.0);
  static SymmetricBilinear identity(int dim);
  static SymmetricBilinear from_matrix(const Eigen::MatrixXd& m);

  const DoubleForm& form() const { return form_; }
  int dim() const { return form_.dim(); }
  Eigen::MatrixXd matrix() const { return form_.to_matrix(); }
  operator const DoubleForm&() const { return form_; }

  // Columns form a basis orthonormal for this bilinear form. Throws when the
  // form is not positive definite.
  Eigen::MatrixXd orthonormal_frame() const;

 private:
  DoubleForm form_;
};

// (2,2) form in the symmetry class C^2.
class CurvatureLike {
 public:
  explicit CurvatureLike(DoubleForm form, double tol = 1e-12);

  const DoubleForm& form() const { return form_; }
  int dim() const { return form_.dim(); }
  operator const DoubleForm&() const { return form_; }

  // Cyclic sum over the first Bianchi identity, maximum absolute defect.
  double bianchi_defect() const;

 private:
  DoubleForm form_;
};

// Exterior product in both factors; associative, and
// product(b, a) = (-1)^{pr + qs} product(a, b).
DoubleForm product(const DoubleForm& a, const DoubleForm& b);

// a^k with power(a, 0) = 1.
DoubleForm power(const DoubleForm& a, int k);

// sum_U product(a, b)(U, U) over index sets U, without forming the product.
double product_diagonal_sum(const DoubleForm& a, const DoubleForm& b);

// c_g w = sum_i w(e_i ^ . (x) e_i ^ .) over a g-orthonormal frame.
DoubleForm contract(const SymmetricBilinear& g, const DoubleForm& w);
// Contraction using the explicit frame whose columns are e_i in basis coordinates.
DoubleForm contract_in_frame(const Eigen::MatrixXd& frame, const DoubleForm& w);
// Applies contract() `times` times.
DoubleForm contract_power(const SymmetricBilinear& g, const DoubleForm& w, int times);

DoubleForm metric_multiply(const SymmetricBilinear& g, const DoubleForm& w);

// Pairing in which the basis monomials (I,J) are orthonormal.
double inner(const DoubleForm& a, const DoubleForm& b);

bool is_in_symmetry_class(const DoubleForm& w, double tol = 0.0);

}  // namespace gby
