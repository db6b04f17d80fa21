#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "sephier/hierarchy.hpp"
#include "sephier/rng.hpp"

using namespace sephier;

namespace {

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v(0) = x;
  return v;
}

}  // namespace

TEST_CASE("internal index encoding is slot-0 major") {
  CHECK(encode_internal({0, 0}, 2) == 0);
  CHECK(encode_internal({0, 1}, 2) == 1);
  CHECK(encode_internal({1, 0}, 2) == 2);
  std::vector<int> decoded;
  decode_internal(5, 3, 2, decoded);  // 5 = 101 base 2 over 3 slots
  CHECK(decoded == std::vector<int>({1, 0, 1}));
}

TEST_CASE("presets build, lift and classify") {
  const JetSpec spec{1, 2, 1};

  SUBCASE("linear presets carry the linear flag") {
    CHECK(make_preset("linear_schrodinger", spec, Statistics(0)).linear);
    CHECK(make_preset("free_schrodinger", spec, Statistics(0)).linear);
    CHECK(!make_preset("cubic_nls", spec, Statistics(0)).linear);
    CHECK(!make_preset("doebner_goldin(0.3)", spec, Statistics(0)).linear);
  }

  SUBCASE("component counts are m^n") {
    const JetSpec wide{1, 2, 2};
    const Hierarchy h = make_preset("cubic_nls", wide, Statistics(0), 3);
    CHECK(h.arity(1).size() == 2);
    CHECK(h.arity(2).size() == 4);
    CHECK(h.arity(3).size() == 8);
  }

  SUBCASE("doebner_goldin needs m = 1, presets need K >= 2") {
    CHECK_THROWS_AS(
        make_preset("doebner_goldin(0.3)", JetSpec{1, 2, 2}, Statistics(0)),
        ShapeError);
    CHECK_THROWS_AS(
        make_preset("linear_schrodinger", JetSpec{1, 1, 1}, Statistics(0)),
        ShapeError);
  }

  SUBCASE("unknown presets are rejected with the known list") {
    try {
      make_preset("gross_pitaevskii", spec, Statistics(0));
      FAIL("expected ShapeError");
    } catch (const ShapeError& err) {
      CHECK(std::string(err.what()).find("linear_schrodinger") != std::string::npos);
    }
  }

  SUBCASE("lifted arity-2 free operator sums the slot stencil entries") {
    const Hierarchy h = make_preset("free_schrodinger", spec, Statistics(0), 2);
    PairJet pair(spec, vec1(0.0), vec1(1.0));
    pair.at(0, 0, 2, 0) = cdouble(2.0, 1.0);   // d^2/dx^2 entry
    pair.at(0, 0, 0, 2) = cdouble(-1.0, 4.0);  // d^2/dy^2 entry
    const Eigen::VectorXcd out = eval_operator(h, pair);
    CHECK(out(0) == -(cdouble(2.0, 1.0) + cdouble(-1.0, 4.0)));
  }
}

TEST_CASE("hierarchy JSON round trip") {
  const JetSpec spec{1, 2, 1};
  const Hierarchy original =
      make_preset("doebner_goldin(0.3)", spec, Statistics(1), 2);
  const std::string text = hierarchy_to_json_text(original);
  const Hierarchy parsed = hierarchy_from_json_text(text);

  CHECK(parsed.stats.fermi == 1);
  CHECK(parsed.spec == original.spec);
  CHECK(parsed.linear == original.linear);
  REQUIRE(parsed.has_arity(1));
  REQUIRE(parsed.has_arity(2));

  // Bit-identical evaluation after the round trip.
  const Jet jet = random_jet(spec, vec1(0.3), 7);
  CHECK(eval_operator(parsed, jet)(0) == eval_operator(original, jet)(0));
  for (std::size_t c = 0; c < original.arity(2).size(); ++c)
    CHECK(structurally_equal(*parsed.arity(2)[c], *original.arity(2)[c]));
}

TEST_CASE("hierarchy JSON validation failures") {
  SUBCASE("component count must be m^n") {
    const std::string text = R"json({"f":0,"d":1,"K":2,"m":2,
      "operators":{"1":["u[0]((0))"]}})json";
    CHECK_THROWS_AS(hierarchy_from_json_text(text), ShapeError);
  }

  SUBCASE("index bounds are enforced") {
    const std::string text = R"json({"f":0,"d":1,"K":2,"m":1,
      "operators":{"1":["u[0]((3))"]}})json";
    CHECK_THROWS_AS(hierarchy_from_json_text(text), ShapeError);
  }

  SUBCASE("missing fields are rejected") {
    CHECK_THROWS_AS(hierarchy_from_json_text(R"({"d":1})"), ShapeError);
    CHECK_THROWS_AS(hierarchy_from_json_text("not json"), ShapeError);
  }

  SUBCASE("missing arity raises on access") {
    const Hierarchy h =
        make_preset("free_schrodinger", JetSpec{1, 2, 1}, Statistics(0), 2);
    CHECK_THROWS_AS(h.arity(3), ShapeError);
  }
}

TEST_CASE("resolve_hierarchy accepts presets and files") {
  const JetSpec spec{1, 2, 1};
  CHECK(resolve_hierarchy("cubic_nls", spec, Statistics(0)).name == "cubic_nls");

  const std::string path = "/tmp/sephier_test_hierarchy.json";
  {
    std::ofstream out(path);
    out << hierarchy_to_json_text(make_preset("cubic_nls", spec, Statistics(1), 2));
  }
  const Hierarchy from_file = resolve_hierarchy(path, spec, Statistics(0));
  CHECK(from_file.stats.fermi == 1);  // the file wins over the passed stats
  CHECK(from_file.name == path);
  std::remove(path.c_str());

  CHECK_THROWS_AS(resolve_hierarchy("/nonexistent/h.json", spec, Statistics(0)),
                  ShapeError);
}
