#include "sephier/jet.hpp"

#include <cmath>
#include <random>

#include "sephier/rng.hpp"

namespace sephier {

namespace {

void check_spec(const JetSpec& spec) {
  if (spec.d < 1 || spec.K < 0 || spec.m < 1)
    throw ShapeError("JetSpec requires d >= 1, K >= 0, m >= 1");
}

}  // namespace

Jet::Jet(JetSpec spec, Eigen::VectorXd basepoint)
    : spec_(spec),
      basepoint_(std::move(basepoint)),
      indices_(spec.d, spec.K),
      values_(Eigen::MatrixXcd::Zero(spec.m, spec.index_count())) {
  check_spec(spec_);
  if (basepoint_.size() != spec_.d)
    throw ShapeError("Jet: basepoint length must equal spec.d");
}

Jet::Jet(JetSpec spec, Eigen::VectorXd basepoint, Eigen::MatrixXcd values)
    : Jet(spec, std::move(basepoint)) {
  if (values.rows() != spec_.m || values.cols() != spec_.index_count())
    throw ShapeError("Jet: value table must be m x binomial(d+K, d)");
  if (!values.allFinite()) throw ShapeError("Jet: values must be finite");
  values_ = std::move(values);
}

cdouble Jet::value(int component, const MultiIndex& index) const {
  const int rank = indices_.index_of(index);
  if (rank < 0) throw ShapeError("Jet::value: multi-index outside the table");
  return values_(component, rank);
}

Jet random_jet(const JetSpec& spec, const Eigen::VectorXd& basepoint,
               std::uint64_t seed, double scale) {
  if (!(scale > 0.0)) throw ShapeError("random_jet: scale must be > 0");
  Jet jet(spec, basepoint);
  std::mt19937_64 rng(seed);
  for (int a = 0; a < spec.m; ++a)
    for (int r = 0; r < spec.index_count(); ++r) {
      const double re = scale * uniform_pm1(rng);
      const double im = scale * uniform_pm1(rng);
      jet.at(a, r) = cdouble(re, im);
    }
  // Genericity floor on the zeroth-order entries: redraw until beta_0 != 0
  // territory is comfortably avoided.
  for (int a = 0; a < spec.m; ++a) {
    while (!(std::abs(jet.zeroth(a)) > 0.1 * scale)) {
      const double re = scale * uniform_pm1(rng);
      const double im = scale * uniform_pm1(rng);
      jet.at(a, 0) = cdouble(re, im);
    }
  }
  return jet;
}

Polynomial::Polynomial(int d, int m, int degree, Eigen::VectorXd center)
    : d_(d),
      m_(m),
      degree_(degree),
      center_(std::move(center)),
      monomials_(d, degree),
      coeff_(Eigen::MatrixXcd::Zero(m, monomials_.size())) {
  if (d < 1 || m < 1 || degree < 0)
    throw ShapeError("Polynomial: d >= 1, m >= 1, degree >= 0 required");
  if (center_.size() != d)
    throw ShapeError("Polynomial: center length must equal d");
}

Eigen::VectorXcd Polynomial::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != d_) throw ShapeError("Polynomial: point length must equal d");
  const Eigen::VectorXd u = x - center_;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(m_);
  for (int r = 0; r < monomials_.size(); ++r) {
    const MultiIndex& mono = monomials_[r];
    double monomial = 1.0;
    for (int k = 0; k < d_; ++k)
      for (int e = 0; e < mono(k); ++e) monomial *= u(k);
    for (int a = 0; a < m_; ++a) out(a) += coeff_(a, r) * monomial;
  }
  return out;
}

Polynomial borel_realize(const Jet& jet) {
  const JetSpec& spec = jet.spec();
  Polynomial poly(spec.d, spec.m, spec.K, jet.basepoint());
  for (int r = 0; r < jet.indices().size(); ++r) {
    const double inv_fact =
        1.0 / static_cast<double>(multi_factorial(jet.indices()[r]));
    for (int a = 0; a < spec.m; ++a)
      poly.coeff(a, r) = jet.value(a, r) * inv_fact;
  }
  return poly;
}

Jet jet_of_poly(const Polynomial& poly, const Eigen::VectorXd& point, int K) {
  const JetSpec spec{poly.dim(), K, poly.components()};
  Jet jet(spec, point);
  const Eigen::VectorXd u = point - poly.center();
  // d_I P^A(p) = sum_{J >= I} c_{A,J} * prod_k J_k!/(J_k-I_k)! * u^(J-I)
  for (int ri = 0; ri < jet.indices().size(); ++ri) {
    const MultiIndex& I = jet.indices()[ri];
    for (int rj = 0; rj < poly.monomials().size(); ++rj) {
      const MultiIndex& J = poly.monomials()[rj];
      bool dominates = true;
      for (int k = 0; k < spec.d; ++k)
        if (J(k) < I(k)) {
          dominates = false;
          break;
        }
      if (!dominates) continue;
      double weight = 1.0;
      for (int k = 0; k < spec.d; ++k) {
        weight *= static_cast<double>(factorial(J(k)) / factorial(J(k) - I(k)));
        for (int e = 0; e < J(k) - I(k); ++e) weight *= u(k);
      }
      for (int a = 0; a < spec.m; ++a)
        jet.at(a, ri) += poly.coeff(a, rj) * weight;
    }
  }
  return jet;
}

ABQuadruple::ABQuadruple(Jet a, Jet b, Jet a_tilde, Jet b_tilde)
    : alpha(std::move(a)),
      beta(std::move(b)),
      alpha_tilde(std::move(a_tilde)),
      beta_tilde(std::move(b_tilde)) {
  if (!(alpha.spec() == beta.spec() && alpha.spec() == alpha_tilde.spec() &&
        alpha.spec() == beta_tilde.spec()))
    throw ShapeError("ABQuadruple: all four jets must share one spec");
  if (alpha.basepoint() != beta.basepoint())
    throw ShapeError("ABQuadruple: alpha and beta must share the basepoint x");
  if (alpha_tilde.basepoint() != beta_tilde.basepoint())
    throw ShapeError(
        "ABQuadruple: alpha_tilde and beta_tilde must share the basepoint y");
}

ABQuadruple random_quadruple(const JetSpec& spec, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, std::uint64_t seed,
                             double scale) {
  return ABQuadruple(random_jet(spec, x, mix_seed(seed, 0), scale),
                     random_jet(spec, x, mix_seed(seed, 1), scale),
                     random_jet(spec, y, mix_seed(seed, 2), scale),
                     random_jet(spec, y, mix_seed(seed, 3), scale));
}

}  // namespace sephier
