#include "gby/combinatorics.hpp"

#include <array>
#include <cmath>

#include "gby/error.hpp"

namespace gby {

double factorial(int m) {
  detail::require(m >= 0, "factorial of a negative integer");
  double r = 1.0;
  for (int i = 2; i <= m; ++i) r *= i;
  return r;
}

double binomial(int m, int r) {
  if (r < 0 || r > m) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (m - r + i) / i;
  return std::round(out);
}

SubsetTable::SubsetTable(int n) : n_(n), by_degree_(n + 1), rank_(std::size_t{1} << n) {
  for (IndexMask m = 0; m < (IndexMask{1} << n); ++m) {
    auto& bucket = by_degree_[degree(m)];
    rank_[m] = bucket.size();
    bucket.push_back(m);
  }
}

const SubsetTable& SubsetTable::get(int n) {
  detail::require(n >= 0 && n <= kMaxDim, "dimension outside [0, " + std::to_string(kMaxDim) + "]");
  static const std::array<SubsetTable, kMaxDim + 1> tables = [] {
    return [&]<std::size_t... Is>(std::index_sequence<Is...>) {
      return std::array<SubsetTable, kMaxDim + 1>{SubsetTable(static_cast<int>(Is))...};
    }(std::make_index_sequence<kMaxDim + 1>{});
  }();
  return tables[n];
}

std::vector<int> mask_to_indices(IndexMask m) {
  std::vector<int> out;
  for (; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

}  // namespace gby
