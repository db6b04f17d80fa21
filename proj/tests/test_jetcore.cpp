#include <doctest.h>

#include <random>

#include "sephier/jet.hpp"
#include "sephier/rng.hpp"

using namespace sephier;

namespace {

MultiIndex mi(std::initializer_list<int> entries) {
  MultiIndex index(static_cast<int>(entries.size()));
  int k = 0;
  for (int e : entries) index(k++) = e;
  return index;
}

Eigen::VectorXd vec(std::initializer_list<double> entries) {
  Eigen::VectorXd v(static_cast<int>(entries.size()));
  int k = 0;
  for (double e : entries) v(k++) = e;
  return v;
}

}  // namespace

TEST_CASE("multi-index enumeration is graded lexicographic") {
  const auto d1 = enum_multi_indices(1, 2);
  REQUIRE(d1.size() == 3);
  CHECK(d1[0] == mi({0}));
  CHECK(d1[1] == mi({1}));
  CHECK(d1[2] == mi({2}));

  const auto d2 = enum_multi_indices(2, 1);
  REQUIRE(d2.size() == 3);
  CHECK(d2[0] == mi({0, 0}));
  CHECK(d2[1] == mi({1, 0}));
  CHECK(d2[2] == mi({0, 1}));

  CHECK(enum_multi_indices(2, 2).size() == 6);
}

TEST_CASE("enumeration size is binomial(d+K, d)") {
  for (int d = 1; d <= 4; ++d)
    for (int K = 0; K <= 4; ++K)
      CHECK(static_cast<std::int64_t>(enum_multi_indices(d, K).size()) ==
            binomial(d + K, d));
}

TEST_CASE("multi-index set rank lookup") {
  const MultiIndexSet set(3, 3);
  for (int r = 0; r < set.size(); ++r) CHECK(set.index_of(set[r]) == r);
  CHECK(set.index_of(mi({4, 0, 0})) == -1);
  CHECK(set.index_of(mi({2, 1, 1})) == -1);  // order 4 > K
  CHECK(set.index_of(mi({1, 1})) == -1);     // wrong length
}

TEST_CASE("ascending subsets and split parity") {
  const auto subsets = ascending_subsets(4, 2);
  REQUIRE(subsets.size() == 6);
  CHECK(subsets.front() == std::vector<int>({0, 1}));
  CHECK(subsets.back() == std::vector<int>({2, 3}));
  CHECK(subset_split_parity({0, 1}, 4) == 0);
  CHECK(subset_split_parity({1, 2}, 4) == 0);  // (1,2,0,3) has 2 inversions
  CHECK(subset_split_parity({1, 3}, 4) == 1);  // (1,3,0,2) has 3 inversions
}

TEST_CASE("random jets are deterministic, complete and generic") {
  const JetSpec spec{1, 2, 2};
  const Eigen::VectorXd x = vec({0.25});
  const Jet a = random_jet(spec, x, 42);
  const Jet b = random_jet(spec, x, 42);
  CHECK(a.values() == b.values());
  CHECK(a.values().rows() == 2);
  CHECK(a.values().cols() == 3);  // 2 * 3 = 6 entries total

  const Jet c = random_jet(spec, x, 43);
  CHECK(a.values() != c.values());

  for (int seed = 0; seed < 1000; ++seed) {
    const Jet jet = random_jet(spec, x, static_cast<std::uint64_t>(seed), 2.0);
    for (int comp = 0; comp < spec.m; ++comp)
      CHECK(std::abs(jet.zeroth(comp)) > 0.1 * 2.0);
  }
}

TEST_CASE("borel realization of simple jets") {
  const JetSpec spec{1, 2, 1};
  Jet jet(spec, vec({0.0}));

  SUBCASE("constant jet gives the constant function") {
    jet.at(0, 0) = cdouble(3.0, -1.0);
    const Polynomial poly = borel_realize(jet);
    CHECK(poly(vec({0.7}))(0) == cdouble(3.0, -1.0));
    CHECK(poly(vec({-1.3}))(0) == cdouble(3.0, -1.0));
  }

  SUBCASE("values (1, 2, 6) give 1 + 2x + 3x^2") {
    jet.at(0, 0) = 1.0;
    jet.at(0, 1) = 2.0;
    jet.at(0, 2) = 6.0;
    const Polynomial poly = borel_realize(jet);
    for (double x : {-1.0, 0.0, 0.5, 2.0}) {
      const cdouble expected = 1.0 + 2.0 * x + 3.0 * x * x;
      CHECK(std::abs(poly(vec({x}))(0) - expected) < 1e-14);
    }
  }
}

TEST_CASE("jet_of_poly differentiates exactly") {
  // P(x) = x^2 around 0: jets at 0 and at 1.
  Polynomial poly(1, 1, 2, vec({0.0}));
  poly.coeff(0, 2) = 1.0;  // monomial x^2

  const Jet at0 = jet_of_poly(poly, vec({0.0}), 2);
  CHECK(at0.value(0, 0) == cdouble(0.0));
  CHECK(at0.value(0, 1) == cdouble(0.0));
  CHECK(at0.value(0, 2) == cdouble(2.0));

  const Jet at1 = jet_of_poly(poly, vec({1.0}), 2);
  CHECK(at1.value(0, 0) == cdouble(1.0));
  CHECK(at1.value(0, 1) == cdouble(2.0));
  CHECK(at1.value(0, 2) == cdouble(2.0));
}

TEST_CASE("borel_realize and jet_of_poly are mutually inverse") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    const int K = static_cast<int>(rng() % 3);
    const int m = 1 + static_cast<int>(rng() % 2);
    const JetSpec spec{d, K, m};
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x(k) = uniform_pm1(rng);

    const Jet jet = random_jet(spec, x, rng());
    const Jet back = jet_of_poly(borel_realize(jet), x, K);
    const double err = (back.values() - jet.values()).cwiseAbs().maxCoeff() /
                       jet.values().cwiseAbs().maxCoeff();
    CHECK(err < 1e-12);
  }
}

TEST_CASE("ab quadruple validates shared spec and basepoints") {
  const JetSpec spec{1, 1, 1};
  const Eigen::VectorXd x = vec({0.0}), y = vec({1.0});
  CHECK_NOTHROW(random_quadruple(spec, x, y, 5));
  CHECK_THROWS_AS(ABQuadruple(random_jet(spec, x, 1), random_jet(spec, y, 2),
                              random_jet(spec, y, 3), random_jet(spec, y, 4)),
                  ShapeError);
  const JetSpec other{1, 2, 1};
  CHECK_THROWS_AS(ABQuadruple(random_jet(spec, x, 1), random_jet(spec, x, 2),
                              random_jet(other, y, 3), random_jet(other, y, 4)),
                  ShapeError);
}
