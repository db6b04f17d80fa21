#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace sephier {

/// Multi-index of partial-derivative orders, one entry per spatial dimension.
using MultiIndex = Eigen::VectorXi;

/// |I|, the total derivative order.
inline int order_of(const MultiIndex& index) { return index.sum(); }

std::int64_t factorial(int n);
std::int64_t binomial(int n, int k);

/// I! — product of the entry factorials.
std::int64_t multi_factorial(const MultiIndex& index);

/// All multi-indices of length d with |I| <= K, graded lexicographically:
/// ascending by |I|, larger leading entries first within a grade.
/// (d=2, K=1) -> (0,0), (1,0), (0,1).
std::vector<MultiIndex> enum_multi_indices(int d, int K);

/// Enumerated multi-index set with rank lookup. Fixes the layout of every
/// jet value table and report in the toolkit.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;
  MultiIndexSet(int d, int K);

  int dim() const { return d_; }
  int max_order() const { return K_; }
  int size() const { return static_cast<int>(indices_.size()); }
  const MultiIndex& operator[](int rank) const { return indices_[rank]; }
  const std::vector<MultiIndex>& all() const { return indices_; }

  /// Rank of I in the enumeration; -1 if the length differs or |I| > K.
  int index_of(const MultiIndex& index) const;

 private:
  int d_ = 0;
  int K_ = 0;
  std::vector<MultiIndex> indices_;
  std::vector<int> rank_by_code_;  // dense (K+1)-ary code -> rank, or empty
};

/// Ascending k-element subsets of {0,...,total-1} in lexicographic order.
std::vector<std::vector<int>> ascending_subsets(int total, int k);

/// Parity (0 even, 1 odd) of the permutation (0,...,total-1) -> (subset,
/// complement), both halves ascending, counted as inversions of the
/// concatenated sequence.
int subset_split_parity(const std::vector<int>& subset, int total);

/// Parity of an arbitrary permutation given as images of 0..n-1.
int permutation_parity(const std::vector<int>& perm);

}  // namespace sephier
