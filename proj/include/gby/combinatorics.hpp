#pragma once

#include <bit>
#include <cstdint>
#include <utility>
#include <vector>

namespace gby {

using IndexMask = std::uint32_t;

// Largest tangent dimension supported by the dense double-form storage.
inline constexpr int kMaxDim = 10;

double factorial(int m);
double binomial(int m, int r);

// Ordered set of all strictly increasing multi-indices of length p in
// {0,...,n-1}, encoded as bitmasks. Ranks follow increasing mask value.
class SubsetTable {
 public:
  static const SubsetTable& get(int n);

  int dim() const { return n_; }
  const std::vector<IndexMask>& subsets(int p) const { return by_degree_[p]; }
  std::size_t count(int p) const { return by_degree_[p].size(); }
  std::size_t rank(IndexMask m) const { return rank_[m]; }

 private:
  explicit SubsetTable(int n);

  int n_;
  std::vector<std::vector<IndexMask>> by_degree_;
  std::vector<std::size_t> rank_;
};

inline int degree(IndexMask m) { return std::popcount(m); }

// Sign of the permutation that sorts the concatenation (a, b) of two
// disjoint increasing multi-indices.
inline int shuffle_sign(IndexMask a, IndexMask b) {
  int inversions = 0;
  for (IndexMask rest = b; rest != 0; rest &= rest - 1) {
    const int y = std::countr_zero(rest);
    inversions += std::popcount(a >> (y + 1));
  }
  return (inversions & 1) ? -1 : 1;
}

// Sign of moving index i (not in m) from the front of (i, m) into sorted position.
inline int insertion_sign(int i, IndexMask m) {
  const IndexMask below = (IndexMask{1} << i) - 1;
  return (std::popcount(m & below) & 1) ? -1 : 1;
}

std::vector<int> mask_to_indices(IndexMask m);

}  // namespace gby
