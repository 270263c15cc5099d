#pragma once

#include <cstddef>
#include <vector>

namespace acfh {

/// Leaf width of the pairwise summation tree. Leaves are summed left to right,
/// leaf totals are combined by recursive halving. The tree shape depends only on
/// the element count, so results are independent of the OpenMP thread count.
inline constexpr std::size_t kPairwiseLeaf = 128;

namespace detail {

inline double pairwise_tree(const double* v, std::size_t n) {
  if (n == 1) return v[0];
  if (n == 2) return v[0] + v[1];
  const std::size_t half = n / 2;
  return pairwise_tree(v, half) + pairwise_tree(v + half, n - half);
}

}  // namespace detail

/// Pairwise sum of term(0), ..., term(n-1).
template <class Term>
double pairwise_reduce(std::size_t n, const Term& term) {
  if (n == 0) return 0.0;
  const std::size_t blocks = (n + kPairwiseLeaf - 1) / kPairwiseLeaf;
  std::vector<double> partial(blocks);
  const auto nblocks = static_cast<std::ptrdiff_t>(blocks);
#pragma omp parallel for schedule(static) if (blocks > 16)
  for (std::ptrdiff_t b = 0; b < nblocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kPairwiseLeaf;
    const std::size_t hi = lo + kPairwiseLeaf < n ? lo + kPairwiseLeaf : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[static_cast<std::size_t>(b)] = s;
  }
  return detail::pairwise_tree(partial.data(), blocks);
}

}  // namespace acfh
