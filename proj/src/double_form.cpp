#include "gby/double_form.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gby/error.hpp"

namespace gby {

namespace {

IndexMask to_mask(std::initializer_list<int> idx, int dim) {
  IndexMask m = 0;
  int prev = -1;
  for (int i : idx) {
    detail::require(i > prev && i < dim, "multi-index must be strictly increasing and within range");
    m |= IndexMask{1} << i;
    prev = i;
  }
  return m;
}

// Sorts a basis tuple; returns the permutation sign, or 0 on repeats.
int sort_tuple(std::span<const int> idx, int dim, IndexMask& mask) {
  mask = 0;
  int sign = 1;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const int i = idx[a];
    detail::require(i >= 0 && i < dim, "basis index out of range");
    if (mask & (IndexMask{1} << i)) return 0;
    // Entries already placed that are larger than i must be jumped over.
    if (std::popcount(mask >> (i + 1)) & 1) sign = -sign;
    mask |= IndexMask{1} << i;
  }
  return sign;
}

}  // namespace

DoubleForm::DoubleForm(int dim, int p, int q) : dim_(dim), p_(p), q_(q) {
  detail::require(dim >= 0 && dim <= kMaxDim, "dimension outside supported range");
  detail::require(p >= 0 && p <= dim && q >= 0 && q <= dim, "bidegree exceeds dimension");
  const auto& t = SubsetTable::get(dim);
  rows_ = t.count(p);
  cols_ = t.count(q);
  coeffs_.assign(rows_ * cols_, 0.0);
}

DoubleForm DoubleForm::scalar(int dim, double value) {
  DoubleForm out(dim, 0, 0);
  out.coeffs_[0] = value;
  return out;
}

DoubleForm DoubleForm::from_matrix(const Eigen::MatrixXd& m) {
  detail::require(m.rows() == m.cols(), "matrix must be square");
  const int n = static_cast<int>(m.rows());
  DoubleForm out(n, 1, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(IndexMask{1} << i, IndexMask{1} << j) = m(i, j);
  return out;
}

std::size_t DoubleForm::index(IndexMask row, IndexMask col) const {
  const auto& t = SubsetTable::get(dim_);
  return t.rank(row) * cols_ + t.rank(col);
}

double DoubleForm::operator()(IndexMask row, IndexMask col) const { return coeffs_[index(row, col)]; }
double& DoubleForm::operator()(IndexMask row, IndexMask col) { return coeffs_[index(row, col)]; }

double DoubleForm::at(std::initializer_list<int> row, std::initializer_list<int> col) const {
  detail::require(static_cast<int>(row.size()) == p_ && static_cast<int>(col.size()) == q_,
                  "multi-index lengths do not match bidegree");
  return (*this)(to_mask(row, dim_), to_mask(col, dim_));
}

void DoubleForm::set(std::initializer_list<int> row, std::initializer_list<int> col, double v) {
  detail::require(static_cast<int>(row.size()) == p_ && static_cast<int>(col.size()) == q_,
                  "multi-index lengths do not match bidegree");
  (*this)(to_mask(row, dim_), to_mask(col, dim_)) = v;
}

double DoubleForm::evaluate(std::span<const int> row, std::span<const int> col) const {
  detail::require(static_cast<int>(row.size()) == p_ && static_cast<int>(col.size()) == q_,
                  "tuple lengths do not match bidegree");
  IndexMask rm = 0, cm = 0;
  const int s = sort_tuple(row, dim_, rm) * sort_tuple(col, dim_, cm);
  return s == 0 ? 0.0 : s * (*this)(rm, cm);
}

Eigen::MatrixXd DoubleForm::to_matrix() const {
  detail::require(p_ == 1 && q_ == 1, "to_matrix requires a (1,1) form");
  Eigen::MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(IndexMask{1} << i, IndexMask{1} << j);
  return m;
}

double DoubleForm::max_abs() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

void DoubleForm::require_same_shape(const DoubleForm& o) const {
  if (dim_ != o.dim_) throw InvalidArgument("double forms of different dimensions");
  if (p_ != o.p_ || q_ != o.q_) throw InvalidArgument("double forms of different bidegrees");
}

DoubleForm& DoubleForm::operator+=(const DoubleForm& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

DoubleForm& DoubleForm::operator-=(const DoubleForm& o) {
  require_same_shape(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

DoubleForm& DoubleForm::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

// ---------------------------------------------------------------------------

SymmetricBilinear::SymmetricBilinear(DoubleForm form, double tol) : form_(std::move(form)) {
  detail::require(form_.p() == 1 && form_.q() == 1, "symmetric bilinear form must have bidegree (1,1)");
  const int n = form_.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double a = form_(IndexMask{1} << i, IndexMask{1} << j);
      const double b = form_(IndexMask{1} << j, IndexMask{1} << i);
      detail::require(std::abs(a - b) <= tol * std::max(1.0, std::abs(a)), "bilinear form is not symmetric");
    }
}

SymmetricBilinear SymmetricBilinear::identity(int dim) {
  return SymmetricBilinear(DoubleForm::from_matrix(Eigen::MatrixXd::Identity(dim, dim)));
}

SymmetricBilinear SymmetricBilinear::from_matrix(const Eigen::MatrixXd& m) {
  return SymmetricBilinear(DoubleForm::from_matrix(m), 1e-14);
}

Eigen::MatrixXd SymmetricBilinear::orthonormal_frame() const {
  // Gram matrix G = L L^T; the columns of L^{-T} are G-orthonormal.
  const Eigen::MatrixXd gram = matrix();
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw InvalidArgument("metric is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  return l.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(dim(), dim()));
}

CurvatureLike::CurvatureLike(DoubleForm form, double tol) : form_(std::move(form)) {
  detail::require(form_.p() == 2 && form_.q() == 2, "curvature-like form must have bidegree (2,2)");
  detail::require(is_in_symmetry_class(form_, tol * std::max(1.0, form_.max_abs())),
                  "curvature-like form violates the C^2 symmetry condition");
}

double CurvatureLike::bianchi_defect() const {
  const int n = dim();
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const int ab[] = {a, b}, bc[] = {b, c}, ca[] = {c, a};
          const int cd[] = {c, d}, ad[] = {a, d}, bd[] = {b, d};
          const double s = form_.evaluate(ab, cd) + form_.evaluate(bc, ad) + form_.evaluate(ca, bd);
          worst = std::max(worst, std::abs(s));
        }
  return worst;
}

// ---------------------------------------------------------------------------

DoubleForm product(const DoubleForm& a, const DoubleForm& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("product: dimension mismatch");
  const int n = a.dim();
  if (a.p() + b.p() > n || a.q() + b.q() > n) throw InvalidArgument("product: degree overflow");

  const auto& t = SubsetTable::get(n);
  DoubleForm out(n, a.p() + b.p(), a.q() + b.q());
  const auto& ar = t.subsets(a.p());
  const auto& ac = t.subsets(a.q());
  const auto& br = t.subsets(b.p());
  const auto& bc = t.subsets(b.q());
  const auto ac_n = ac.size(), bc_n = bc.size();
  const auto av = a.coeffs(), bv = b.coeffs();

  for (std::size_t i1 = 0; i1 < ar.size(); ++i1) {
    for (std::size_t j1 = 0; j1 < ac_n; ++j1) {
      const double x = av[i1 * ac_n + j1];
      if (x == 0.0) continue;
      for (std::size_t i2 = 0; i2 < br.size(); ++i2) {
        if (ar[i1] & br[i2]) continue;
        const IndexMask row = ar[i1] | br[i2];
        const int srow = shuffle_sign(ar[i1], br[i2]);
        for (std::size_t j2 = 0; j2 < bc_n; ++j2) {
          if (ac[j1] & bc[j2]) continue;
          const double y = bv[i2 * bc_n + j2];
          if (y == 0.0) continue;
          const int s = srow * shuffle_sign(ac[j1], bc[j2]);
          out(row, ac[j1] | bc[j2]) += s * x * y;
        }
      }
    }
  }
  return out;
}

double product_diagonal_sum(const DoubleForm& a, const DoubleForm& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("product: dimension mismatch");
  if (a.p() + b.p() != a.q() + b.q()) throw InvalidArgument("product_diagonal_sum: product is not square");
  if (a.p() + b.p() > a.dim()) throw InvalidArgument("product: degree overflow");
  const auto& t = SubsetTable::get(a.dim());
  const auto& ar = t.subsets(a.p());
  const auto& ac = t.subsets(a.q());
  const auto& br = t.subsets(b.p());
  const auto ac_n = ac.size();
  const auto av = a.coeffs();
  double acc = 0.0;
  for (std::size_t i1 = 0; i1 < ar.size(); ++i1) {
    for (IndexMask r2 : br) {
      if (ar[i1] & r2) continue;
      const IndexMask u = ar[i1] | r2;
      const int srow = shuffle_sign(ar[i1], r2);
      for (std::size_t j1 = 0; j1 < ac_n; ++j1) {
        if ((ac[j1] & u) != ac[j1]) continue;
        const double x = av[i1 * ac_n + j1];
        if (x == 0.0) continue;
        const IndexMask c2 = u ^ ac[j1];
        acc += srow * shuffle_sign(ac[j1], c2) * x * b(r2, c2);
      }
    }
  }
  return acc;
}

DoubleForm power(const DoubleForm& a, int k) {
  detail::require(k >= 0, "power: negative exponent");
  if (k == 0) return DoubleForm::scalar(a.dim(), 1.0);
  DoubleForm out = a;
  for (int i = 1; i < k; ++i) out = product(out, a);
  return out;
}

DoubleForm contract_in_frame(const Eigen::MatrixXd& frame, const DoubleForm& w) {
  const int n = w.dim();
  if (w.p() < 1 || w.q() < 1) throw InvalidArgument("contract: bidegree must be at least (1,1)");
  detail::require(frame.rows() == n && frame.cols() == n, "contract: frame has wrong shape");

  // sum_i w(e_i ^ v, e_i ^ w) = sum_{a,b} G^{ab} w(b_a ^ v, b_b ^ w), G^{-1} = F F^T.
  const Eigen::MatrixXd inv_gram = frame * frame.transpose();
  const auto& t = SubsetTable::get(n);
  DoubleForm out(n, w.p() - 1, w.q() - 1);
  const auto& rows = t.subsets(w.p() - 1);
  const auto& cols = t.subsets(w.q() - 1);
  for (IndexMask r : rows) {
    for (IndexMask c : cols) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) {
        if (r & (IndexMask{1} << a)) continue;
        const IndexMask ra = r | (IndexMask{1} << a);
        const int sa = insertion_sign(a, r);
        for (int b = 0; b < n; ++b) {
          if (c & (IndexMask{1} << b)) continue;
          const double gab = inv_gram(a, b);
          if (gab == 0.0) continue;
          acc += gab * sa * insertion_sign(b, c) * w(ra, c | (IndexMask{1} << b));
        }
      }
      out(r, c) = acc;
    }
  }
  return out;
}

DoubleForm contract(const SymmetricBilinear& g, const DoubleForm& w) {
  if (g.dim() != w.dim()) throw InvalidArgument("contract: dimension mismatch");
  return contract_in_frame(g.orthonormal_frame(), w);
}

DoubleForm contract_power(const SymmetricBilinear& g, const DoubleForm& w, int times) {
  if (g.dim() != w.dim()) throw InvalidArgument("contract: dimension mismatch");
  const Eigen::MatrixXd frame = g.orthonormal_frame();
  DoubleForm out = w;
  for (int i = 0; i < times; ++i) out = contract_in_frame(frame, out);
  return out;
}

DoubleForm metric_multiply(const SymmetricBilinear& g, const DoubleForm& w) { return product(g.form(), w); }

double inner(const DoubleForm& a, const DoubleForm& b) {
  if (a.dim() != b.dim()) throw InvalidArgument("inner: dimension mismatch");
  if (a.p() != b.p() || a.q() != b.q()) throw InvalidArgument("inner: bidegree mismatch");
  double acc = 0.0;
  const auto av = a.coeffs(), bv = b.coeffs();
  for (std::size_t i = 0; i < av.size(); ++i) acc += av[i] * bv[i];
  return acc;
}

bool is_in_symmetry_class(const DoubleForm& w, double tol) {
  if (!w.is_square()) throw InvalidArgument("symmetry class test requires a square bidegree");
  const auto& subsets = SubsetTable::get(w.dim()).subsets(w.p());
  for (std::size_t i = 0; i < subsets.size(); ++i)
    for (std::size_t j = i + 1; j < subsets.size(); ++j)
      if (std::abs(w(subsets[i], subsets[j]) - w(subsets[j], subsets[i])) > tol) return false;
  return true;
}

}  // namespace gby
