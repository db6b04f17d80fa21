#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "sephier/common.hpp"
#include "sephier/multi_index.hpp"

namespace sephier {

/// Dimensions of a truncated jet: spatial dimension d, maximum derivative
/// order K, number of internal components m.
struct JetSpec {
  int d = 1;
  int K = 2;
  int m = 1;

  /// Number of multi-indices with |I| <= K, i.e. binomial(d+K, d).
  int index_count() const {
    return static_cast<int>(binomial(d + K, d));
  }

  bool operator==(const JetSpec&) const = default;
};

/// Complete table of partial-derivative values of an m-component function at
/// a basepoint: value(A, I) for A in [0,m) and |I| <= K, graded-lex layout.
class Jet {
 public:
  Jet(JetSpec spec, Eigen::VectorXd basepoint);
  Jet(JetSpec spec, Eigen::VectorXd basepoint, Eigen::MatrixXcd values);

  const JetSpec& spec() const { return spec_; }
  const Eigen::VectorXd& basepoint() const { return basepoint_; }
  const MultiIndexSet& indices() const { return indices_; }

  /// m x index_count table, rows = internal component A.
  const Eigen::MatrixXcd& values() const { return values_; }
  Eigen::MatrixXcd& values() { return values_; }

  cdouble value(int component, int rank) const { return values_(component, rank); }
  cdouble value(int component, const MultiIndex& index) const;
  cdouble& at(int component, int rank) { return values_(component, rank); }

  /// value(A, I = 0) — the zeroth-order (function value) entry.
  cdouble zeroth(int component) const { return values_(component, 0); }

 private:
  JetSpec spec_;
  Eigen::VectorXd basepoint_;
  MultiIndexSet indices_;
  Eigen::MatrixXcd values_;
};

/// Generic random jet: real and imaginary parts uniform in [-scale, scale],
/// zeroth-order entries redrawn until |value(A,0)| > 0.1*scale for every A.
/// Byte-identical tables for equal (spec, basepoint, seed, scale).
Jet random_jet(const JetSpec& spec, const Eigen::VectorXd& basepoint,
               std::uint64_t seed, double scale = 1.0);

/// m-component polynomial in d variables around a center point, stored as a
/// complete coefficient table over the monomials (x - center)^I, |I| <= degree.
class Polynomial {
 public:
  Polynomial(int d, int m, int degree, Eigen::VectorXd center);

  int dim() const { return d_; }
  int components() const { return m_; }
  int degree() const { return degree_; }
  const Eigen::VectorXd& center() const { return center_; }
  const MultiIndexSet& monomials() const { return monomials_; }

  const Eigen::MatrixXcd& coefficients() const { return coeff_; }
  cdouble& coeff(int component, int rank) { return coeff_(component, rank); }
  cdouble coeff(int component, int rank) const { return coeff_(component, rank); }

  Eigen::VectorXcd operator()(const Eigen::VectorXd& x) const;

 private:
  int d_;
  int m_;
  int degree_;
  Eigen::VectorXd center_;
  MultiIndexSet monomials_;
  Eigen::MatrixXcd coeff_;  // m x monomial count
};

/// Taylor polynomial of the jet at its basepoint: P^A(x) =
/// sum_I value(A,I) (x - basepoint)^I / I!. Realizes any finite jet exactly.
Polynomial borel_realize(const Jet& jet);

/// Exact jet of a polynomial at an arbitrary point, by symbolic
/// differentiation of the coefficient table (no finite differences).
Jet jet_of_poly(const Polynomial& poly, const Eigen::VectorXd& point, int K);

/// The alpha/beta quantities: jets of two functions at x (alpha, beta) and of
/// two functions at y (alpha_tilde, beta_tilde), sharing one spec.
struct ABQuadruple {
  Jet alpha;
  Jet beta;
  Jet alpha_tilde;
  Jet beta_tilde;

  ABQuadruple(Jet a, Jet b, Jet a_tilde, Jet b_tilde);

  const JetSpec& spec() const { return alpha.spec(); }
  const Eigen::VectorXd& x() const { return alpha.basepoint(); }
  const Eigen::VectorXd& y() const { return alpha_tilde.basepoint(); }
};

ABQuadruple random_quadruple(const JetSpec& spec, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, std::uint64_t seed,
                             double scale = 1.0);

}  // namespace sephier
