#include "sephier/multi_index.hpp"

#include <stdexcept>

namespace sephier {

std::int64_t factorial(int n) {
  if (n < 0 || n > 20) throw std::invalid_argument("factorial: n out of range");
  std::int64_t r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

std::int64_t multi_factorial(const MultiIndex& index) {
  std::int64_t r = 1;
  for (int k = 0; k < index.size(); ++k) r *= factorial(index(k));
  return r;
}

namespace {

void enum_grade(int d, int grade, MultiIndex& scratch, int pos,
                std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    scratch(pos) = grade;
    out.push_back(scratch);
    return;
  }
  for (int a = grade; a >= 0; --a) {
    scratch(pos) = a;
    enum_grade(d, grade - a, scratch, pos + 1, out);
  }
}

}  // namespace

std::vector<MultiIndex> enum_multi_indices(int d, int K) {
  if (d < 1) throw std::invalid_argument("enum_multi_indices: d must be >= 1");
  if (K < 0) throw std::invalid_argument("enum_multi_indices: K must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(binomial(d + K, d)));
  MultiIndex scratch(d);
  for (int grade = 0; grade <= K; ++grade) enum_grade(d, grade, scratch, 0, out);
  return out;
}

MultiIndexSet::MultiIndexSet(int d, int K)
    : d_(d), K_(K), indices_(enum_multi_indices(d, K)) {
  // Dense rank table over the (K+1)-ary codes, skipped if it would be large.
  std::int64_t codes = 1;
  for (int k = 0; k < d; ++k) {
    codes *= (K + 1);
    if (codes > (1 << 20)) return;
  }
  rank_by_code_.assign(static_cast<std::size_t>(codes), -1);
  for (int r = 0; r < size(); ++r) {
    std::int64_t code = 0;
    for (int k = d - 1; k >= 0; --k) code = code * (K + 1) + indices_[r](k);
    rank_by_code_[static_cast<std::size_t>(code)] = r;
  }
}

int MultiIndexSet::index_of(const MultiIndex& index) const {
  if (index.size() != d_) return -1;
  std::int64_t code = 0;
  for (int k = d_ - 1; k >= 0; --k) {
    const int e = index(k);
    if (e < 0 || e > K_) return -1;
    code = code * (K_ + 1) + e;
  }
  if (order_of(index) > K_) return -1;
  if (!rank_by_code_.empty()) return rank_by_code_[static_cast<std::size_t>(code)];
  for (int r = 0; r < size(); ++r)
    if ((indices_[r].array() == index.array()).all()) return r;
  return -1;
}

std::vector<std::vector<int>> ascending_subsets(int total, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  current.reserve(static_cast<std::size_t>(k));
  // Iterative lexicographic enumeration.
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) idx[static_cast<std::size_t>(j)] = j;
  if (k == 0) {
    out.push_back({});
    return out;
  }
  if (k > total) return out;
  while (true) {
    out.push_back(idx);
    int j = k - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == total - k + j) --j;
    if (j < 0) break;
    ++idx[static_cast<std::size_t>(j)];
    for (int l = j + 1; l < k; ++l)
      idx[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l - 1)] + 1;
  }
  return out;
}

int subset_split_parity(const std::vector<int>& subset, int total) {
  std::vector<char> in_subset(static_cast<std::size_t>(total), 0);
  for (int s : subset) in_subset[static_cast<std::size_t>(s)] = 1;
  std::vector<int> seq;
  seq.reserve(static_cast<std::size_t>(total));
  seq.insert(seq.end(), subset.begin(), subset.end());
  for (int v = 0; v < total; ++v)
    if (!in_subset[static_cast<std::size_t>(v)]) seq.push_back(v);
  return permutation_parity(seq);
}

int permutation_parity(const std::vector<int>& perm) {
  int inversions = 0;
  const int n = static_cast<int>(perm.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (perm[static_cast<std::size_t>(a)] > perm[static_cast<std::size_t>(b)])
        ++inversions;
  return inversions & 1;
}

}  // namespace sephier
