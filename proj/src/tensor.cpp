#include "sephier/tensor.hpp"

#include <algorithm>
#include <numeric>

namespace sephier {

double sym_prefactor(int n, int m) {
  return static_cast<double>(factorial(n)) * static_cast<double>(factorial(m)) /
         static_cast<double>(factorial(n + m));
}

GridState simple_tensor(const GridState& phi, const GridState& psi) {
  if (!(phi.grid() == psi.grid()) || phi.internal_dim() != psi.internal_dim())
    throw ShapeError("simple_tensor: incompatible grids or internal dimensions");
  GridState out(phi.grid(), phi.particles() + psi.particles(), phi.internal_dim());
  const long nb = psi.size();
  for (long ia = 0; ia < phi.size(); ++ia)
    for (long ib = 0; ib < nb; ++ib) out[ia * nb + ib] = phi[ia] * psi[ib];
  return out;
}

GridState sym_tensor(const GridState& phi, const GridState& psi,
                     Statistics stats, bool check_symmetry) {
  if (!(phi.grid() == psi.grid()) || phi.internal_dim() != psi.internal_dim())
    throw ShapeError("sym_tensor: incompatible grids or internal dimensions");
  if (check_symmetry &&
      (!has_exchange_symmetry(phi, stats) || !has_exchange_symmetry(psi, stats)))
    throw ShapeError("sym_tensor: factor lacks the required exchange symmetry");

  const int n = phi.particles();
  const int m = psi.particles();
  const int total = n + m;
  const double pref = sym_prefactor(n, m);

  GridState out(phi.grid(), total, phi.internal_dim());
  const auto subsets = ascending_subsets(total, n);

  std::vector<long> digits, phi_digits(static_cast<std::size_t>(n)),
      psi_digits(static_cast<std::size_t>(m));
  std::vector<std::pair<double, std::vector<char>>> terms;
  terms.reserve(subsets.size());
  for (const auto& subset : subsets) {
    const int parity = subset_split_parity(subset, total);
    const double sign = (stats.fermi && parity) ? -1.0 : 1.0;
    std::vector<char> member(static_cast<std::size_t>(total), 0);
    for (int s : subset) member[static_cast<std::size_t>(s)] = 1;
    terms.emplace_back(sign, std::move(member));
  }

  for (long flat = 0; flat < out.size(); ++flat) {
    out.decode(flat, digits);
    cdouble acc = 0.0;
    for (const auto& [sign, member] : terms) {
      int ip = 0, iq = 0;
      for (int j = 0; j < total; ++j) {
        if (member[static_cast<std::size_t>(j)])
          phi_digits[static_cast<std::size_t>(ip++)] = digits[static_cast<std::size_t>(j)];
        else
          psi_digits[static_cast<std::size_t>(iq++)] = digits[static_cast<std::size_t>(j)];
      }
      acc += sign * phi[phi.encode(phi_digits)] * psi[psi.encode(psi_digits)];
    }
    out[flat] = pref * acc;
  }
  return out;
}

GridState conglomerate_sym_tensor(const GridState& phi, const GridState& psi,
                                  Statistics stats) {
  if (phi.particles() != psi.particles())
    throw ShapeError("conglomerate_sym_tensor: factors must have equal particle count");
  return sym_tensor(phi, psi, stats);
}

GridState symmetrize(const GridState& state, Statistics stats) {
  const int p = state.particles();
  std::vector<int> perm(static_cast<std::size_t>(p));
  std::iota(perm.begin(), perm.end(), 0);

  GridState out(state.grid(), p, state.internal_dim());
  std::vector<long> digits, permuted(static_cast<std::size_t>(p));
  double count = 0.0;
  do {
    const int parity = permutation_parity(perm);
    const double sign = (stats.fermi && parity) ? -1.0 : 1.0;
    for (long flat = 0; flat < out.size(); ++flat) {
      out.decode(flat, digits);
      for (int j = 0; j < p; ++j)
        permuted[static_cast<std::size_t>(j)] =
            digits[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])];
      out[flat] += sign * state[state.encode(permuted)];
    }
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  out.amplitudes() /= count;
  return out;
}

bool has_exchange_symmetry(const GridState& state, Statistics stats, double tol) {
  const int p = state.particles();
  if (p == 1) return true;
  const double scale = state.amplitudes().cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  std::vector<int> perm(static_cast<std::size_t>(p));
  for (int t = 0; t + 1 < p; ++t) {
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[static_cast<std::size_t>(t)], perm[static_cast<std::size_t>(t + 1)]);
    const GridState swapped = permute_slots(state, perm);
    const double dev =
        (swapped.amplitudes() - stats.sign() * state.amplitudes()).cwiseAbs().maxCoeff();
    if (dev > tol * scale) return false;
  }
  return true;
}

PairJet::PairJet(JetSpec spec, Eigen::VectorXd x, Eigen::VectorXd y)
    : spec_(spec),
      x_(std::move(x)),
      y_(std::move(y)),
      indices_(spec.d, spec.K),
      values_(Eigen::MatrixXcd::Zero(spec.m * spec.m,
                                     static_cast<long>(indices_.size()) * indices_.size())) {
  if (x_.size() != spec.d || y_.size() != spec.d)
    throw ShapeError("PairJet: basepoints must have length spec.d");
}

PairJet pair_product_jet(const ABQuadruple& ab, double prefactor, double sign) {
  const JetSpec& spec = ab.spec();
  PairJet pj(spec, ab.x(), ab.y());
  const int cnt = pj.indices().size();
  for (int a = 0; a < spec.m; ++a)
    for (int b = 0; b < spec.m; ++b)
      for (int ri = 0; ri < cnt; ++ri)
        for (int rj = 0; rj < cnt; ++rj)
          pj.at(a, b, ri, rj) =
              prefactor * (ab.alpha.value(a, ri) * ab.beta_tilde.value(b, rj) +
                           sign * ab.beta.value(a, ri) * ab.alpha_tilde.value(b, rj));
  return pj;
}

PairJet sym_product_jet(const ABQuadruple& ab, Statistics stats) {
  return pair_product_jet(ab, 0.5, stats.sign());
}

PairJet plain_product_jet(const Jet& alpha, const Jet& beta_tilde) {
  if (!(alpha.spec() == beta_tilde.spec()))
    throw ShapeError("plain_product_jet: jets must share one spec");
  PairJet pj(alpha.spec(), alpha.basepoint(), beta_tilde.basepoint());
  const int cnt = pj.indices().size();
  for (int a = 0; a < alpha.spec().m; ++a)
    for (int b = 0; b < alpha.spec().m; ++b)
      for (int ri = 0; ri < cnt; ++ri)
        for (int rj = 0; rj < cnt; ++rj)
          pj.at(a, b, ri, rj) = alpha.value(a, ri) * beta_tilde.value(b, rj);
  return pj;
}

}  // namespace sephier
