#include "gby/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>
#include <vector>

#include "gby/error.hpp"

namespace gby {

namespace {

void require_order(int n, int k) {
  if (k < 1 || 2 * k > n) throw InvalidArgument("order k must satisfy 1 <= k <= n/2");
}

// All permutations of {0,...,m-1} with their signs.
std::vector<std::pair<std::vector<int>, int>> signed_permutations(int m) {
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::pair<std::vector<int>, int>> out;
  do {
    int inv = 0;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if (p[a] > p[b]) ++inv;
    out.emplace_back(p, (inv & 1) ? -1 : 1);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

struct KroneckerTotals {
  double sum = 0.0;
  double abs_sum = 0.0;
};

KroneckerTotals kronecker_totals(const CurvatureLike& R, int k) {
  const int n = R.dim();
  require_order(n, k);
  if (n > kKroneckerMaxDim)
    throw InvalidArgument("Kronecker evaluator limited to n <= " + std::to_string(kKroneckerMaxDim));

  // Dense 4-index table R4[a,b,c,d] = R(e_a ^ e_b, e_c ^ e_d).
  std::vector<double> r4(static_cast<std::size_t>(n) * n * n * n);
  auto at = [n](int a, int b, int c, int d) { return ((a * n + b) * n + c) * n + d; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const int ab[] = {a, b}, cd[] = {c, d};
          r4[at(a, b, c, d)] = R.form().evaluate(ab, cd);
        }

  const int m = 2 * k;
  const auto perms = signed_permutations(m);
  KroneckerTotals totals;
  std::vector<int> tuple(m);
  std::vector<int> image(m);

  // Enumerate ordered tuples of distinct indices.
  auto recurse = [&](auto&& self, int depth, IndexMask used) -> void {
    if (depth == m) {
      for (const auto& [perm, sign] : perms) {
        for (int a = 0; a < m; ++a) image[a] = tuple[perm[a]];
        double term = sign;
        for (int pair = 0; pair < k && term != 0.0; ++pair)
          term *= r4[at(tuple[2 * pair], tuple[2 * pair + 1], image[2 * pair], image[2 * pair + 1])];
        totals.sum += term;
        totals.abs_sum += std::abs(term);
      }
      return;
    }
    for (int i = 0; i < n; ++i) {
      if (used & (IndexMask{1} << i)) continue;
      tuple[depth] = i;
      self(self, depth + 1, used | (IndexMask{1} << i));
    }
  };
  recurse(recurse, 0, 0);
  return totals;
}

}  // namespace

InvariantConstants invariant_constants(int n, int k) {
  require_order(n, k);
  detail::require(n >= 3, "invariant constants need n >= 3");
  InvariantConstants c;
  c.n = n;
  c.k = k;
  const double common = factorial(2 * k) / (std::pow(2.0, k) * factorial(n - 2 * k));
  c.C_nk = common * factorial(n - 3);
  c.lambda_k = common * factorial(n - 1);
  return c;
}

double gauss_bonnet(const CurvatureLike& R, const SymmetricBilinear& g, int k) {
  if (R.dim() != g.dim()) throw InvalidArgument("gauss_bonnet: dimension mismatch");
  require_order(R.dim(), k);
  // In an orthonormal basis the full contraction is (2k)! times the diagonal sum.
  if (g.matrix().isIdentity(0.0)) return product_diagonal_sum(power(R.form(), k - 1), R.form());
  const DoubleForm top = contract_power(g, power(R.form(), k), 2 * k);
  return top.coeffs()[0] / factorial(2 * k);
}

SymmetricBilinear ricci_2k(const CurvatureLike& R, const SymmetricBilinear& g, int k) {
  if (R.dim() != g.dim()) throw InvalidArgument("ricci_2k: dimension mismatch");
  require_order(R.dim(), k);
  DoubleForm ric = contract_power(g, power(R.form(), k), 2 * k - 1);
  // Contraction of a C-class form is symmetric up to rounding.
  const Eigen::MatrixXd m = ric.to_matrix();
  return SymmetricBilinear::from_matrix(0.5 * (m + m.transpose()));
}

double space_form_gauss_bonnet(int n, int k, double mu) {
  require_order(n, k);
  return factorial(n) / (factorial(n - 2 * k) * std::pow(2.0, k)) * std::pow(mu, k);
}

double space_form_ricci_coefficient(int n, int k, double mu) {
  require_order(n, k);
  return factorial(n - 1) * factorial(2 * k) / (factorial(n - 2 * k) * std::pow(2.0, k)) * std::pow(mu, k);
}

double kronecker_sum(const CurvatureLike& R, int k) { return kronecker_totals(R, k).sum; }

double gauss_bonnet_kronecker(const CurvatureLike& R, int k, double c_nk) { return c_nk * kronecker_sum(R, k); }

KroneckerCalibration calibrate_kronecker_constant(int n, int k, int samples, std::uint64_t seed) {
  detail::require(samples >= 2, "calibration needs at least two samples");
  require_order(n, k);
  std::mt19937_64 rng(seed);
  const SymmetricBilinear g = SymmetricBilinear::identity(n);
  std::vector<double> ratios;
  KroneckerCalibration cal;
  cal.n = n;
  cal.k = k;
  cal.seed = seed;
  for (int s = 0; s < samples; ++s) {
    const CurvatureLike R = random_curvature_like(n, rng);
    const KroneckerTotals raw = kronecker_totals(R, k);
    // Near-cancelling sums carry no usable relative precision.
    if (raw.abs_sum == 0.0 || std::abs(raw.sum) < 1e-6 * raw.abs_sum) {
      ++cal.samples_skipped;
      continue;
    }
    ratios.push_back(gauss_bonnet(R, g, k) / raw.sum);
  }
  if (ratios.size() < 2) throw ConventionError("calibration: fewer than two usable samples");
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
  cal.value = mean;
  cal.relative_spread = (*hi - *lo) / std::abs(mean);
  cal.samples_used = static_cast<int>(ratios.size());
  if (!(cal.relative_spread <= 1e-10))
    throw ConventionError("calibration: Kronecker ratio is not constant across samples");
  return cal;
}

KroneckerCalibration cached_kronecker_constant(int n, int k) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, KroneckerCalibration> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({n, k});
  if (it == cache.end()) it = cache.emplace(std::pair{n, k}, calibrate_kronecker_constant(n, k, 10)).first;
  return it->second;
}

CurvatureLike space_form_curvature(int n, double mu) {
  const SymmetricBilinear g = SymmetricBilinear::identity(n);
  return CurvatureLike(0.5 * mu * product(g.form(), g.form()));
}

CurvatureLike gauss_equation_curvature(std::span<const double> principal_curvatures) {
  const int n = static_cast<int>(principal_curvatures.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = principal_curvatures[i];
  const DoubleForm shape = DoubleForm::from_matrix(a);
  return CurvatureLike(0.5 * product(shape, shape));
}

double elementary_symmetric(std::span<const double> x, int order) {
  if (order < 0 || order > static_cast<int>(x.size())) return 0.0;
  // e[j] after processing a prefix of x.
  std::vector<double> e(order + 1, 0.0);
  e[0] = 1.0;
  for (double v : x)
    for (int j = order; j >= 1; --j) e[j] += v * e[j - 1];
  return e[order];
}

HypersurfaceCheck hypersurface_sigma_check(int n, double r, int k) {
  detail::require(r > 0.0, "radius must be positive");
  const std::vector<double> kappa(n, 1.0 / r);
  HypersurfaceCheck out;
  out.gauss_bonnet = gauss_bonnet(gauss_equation_curvature(kappa), SymmetricBilinear::identity(n), k);
  out.sigma = elementary_symmetric(kappa, 2 * k);
  out.ratio = out.gauss_bonnet / out.sigma;
  return out;
}

CurvatureLike random_curvature_like(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  DoubleForm w(n, 2, 2);
  const auto& pairs = SubsetTable::get(n).subsets(2);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = i; j < pairs.size(); ++j) {
      const double v = unif(rng);
      w(pairs[i], pairs[j]) = v;
      w(pairs[j], pairs[i]) = v;
    }
  return CurvatureLike(std::move(w));
}

}  // namespace gby
