#pragma once

#include <Eigen/Core>

#include "sephier/grid.hpp"
#include "sephier/jet.hpp"

namespace sephier {

/// Exchange statistics: Fermi number 0 for bosons, 1 for fermions.
struct Statistics {
  int fermi = 0;

  explicit Statistics(int f = 0) : fermi(f) {
    if (f != 0 && f != 1) throw ShapeError("Statistics: Fermi number must be 0 or 1");
  }

  double sign() const { return fermi ? -1.0 : 1.0; }
};

/// Normalization factor n!m!/(n+m)! of the (anti-)symmetrized product.
double sym_prefactor(int n, int m);

/// Plain tensor product: (phi (x) psi)(xi_1..xi_{p+q}) =
/// phi(xi_1..xi_p) psi(xi_{p+1}..xi_{p+q}).
GridState simple_tensor(const GridState& phi, const GridState& psi);

/// (Anti-)symmetrized tensor product: sum over ascending index subsets of
/// size n with sign (-1)^(f * parity), prefactor n!m!/(n+m)!. Factors are
/// assumed to carry the right permutation symmetry already; pass
/// check_symmetry to verify that precondition (tolerance 1e-10).
GridState sym_tensor(const GridState& phi, const GridState& psi,
                     Statistics stats, bool check_symmetry = false);

/// Product of two N-particle conglomerates, prefactor N!^2/(2N)!. Identical
/// to sym_tensor with n = m = N; kept separate to pin the equal-size contract.
GridState conglomerate_sym_tensor(const GridState& phi, const GridState& psi,
                                  Statistics stats);

/// Full (anti-)symmetrization projector S: mean over all p! slot permutations
/// with sign (-1)^(f * parity).
GridState symmetrize(const GridState& state, Statistics stats);

/// True when every adjacent slot transposition multiplies the state by
/// (-1)^f within the given relative tolerance.
bool has_exchange_symmetry(const GridState& state, Statistics stats,
                           double tol = 1e-10);

/// Two-particle jet table a^{AB}_{I,J}: derivative values of a two-particle
/// function at (x, y), complete over both internal indices and both
/// multi-indices.
class PairJet {
 public:
  PairJet(JetSpec spec, Eigen::VectorXd x, Eigen::VectorXd y);

  const JetSpec& spec() const { return spec_; }
  const Eigen::VectorXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  const MultiIndexSet& indices() const { return indices_; }

  /// (m*m) x (cnt*cnt) table; row A*m+B, column rank_I*cnt + rank_J.
  const Eigen::MatrixXcd& values() const { return values_; }
  Eigen::MatrixXcd& values() { return values_; }

  cdouble value(int a, int b, int rank_i, int rank_j) const {
    return values_(a * spec_.m + b, rank_i * indices_.size() + rank_j);
  }
  cdouble& at(int a, int b, int rank_i, int rank_j) {
    return values_(a * spec_.m + b, rank_i * indices_.size() + rank_j);
  }

 private:
  JetSpec spec_;
  Eigen::VectorXd x_;
  Eigen::VectorXd y_;
  MultiIndexSet indices_;
  Eigen::MatrixXcd values_;
};

/// Constrained pair jet of a general weighted combination:
/// a^{AB}_{I,J} = prefactor * (alpha_I^A bt_J^B + sign * beta_I^A at_J^B).
PairJet pair_product_jet(const ABQuadruple& ab, double prefactor, double sign);

/// Eq-form pair jet of the (anti-)symmetrized product:
/// a^{AB}_{I,J} = 1/2 (alpha_I^A bt_J^B + (-1)^f beta_I^A at_J^B).
PairJet sym_product_jet(const ABQuadruple& ab, Statistics stats);

/// Pair jet of the plain product, a^{AB}_{I,J} = alpha_I^A bt_J^B.
PairJet plain_product_jet(const Jet& alpha, const Jet& beta_tilde);

}  // namespace sephier
