#include <doctest.h>

#include <sstream>

#include "sephier/evolution.hpp"
#include "sephier/rng.hpp"

using namespace sephier;

namespace {

const JetSpec kSpec{1, 2, 1};

Hierarchy preset(const std::string& name, int f = 0) {
  return make_preset(name, kSpec, Statistics(f), 2);
}

}  // namespace

TEST_CASE("plane waves are discrete eigenstates of the free evolution") {
  const Grid grid(2.0 * 3.14159265358979323846, 64);
  const Hierarchy free = preset("free_schrodinger");
  const int k = 3;
  const GridState wave = one_particle_state(
      grid, [&](double x) { return std::exp(kImaginaryUnit * (k * x)); });

  const double h = grid.spacing();
  const double omega = (2.0 - 2.0 * std::cos(k * h)) / (h * h);
  const double t = 1e-4 * 100;

  const EvolutionMap map{&free, Integrator::RK4, 1e-4, 100};
  const GridState evolved = evolve(map, wave);

  // dPsi/dt = i H(Psi) with H(e^{ikx}) = omega e^{ikx} under the centered
  // stencil, so the state picks up the phase e^{i omega t}.
  const cdouble phase = std::exp(kImaginaryUnit * (omega * t));
  double worst = 0.0;
  for (int j = 0; j < 64; ++j)
    worst = std::max(worst, std::abs(evolved[j] - phase * wave[j]));
  CHECK(worst < 1e-8);
}

TEST_CASE("zero generator evolves to the identity") {
  Hierarchy zero;
  zero.spec = kSpec;
  zero.operators[1].push_back(parse_operator("0"));
  finalize_hierarchy(zero);
  REQUIRE(zero.linear);

  const Grid grid(6.283185307179586, 16);
  const GridState state = random_state(grid, 1, 1, 3);
  const EvolutionMap map{&zero, Integrator::RK4, 1e-3, 50};
  const GridState out = evolve(map, state);
  CHECK(out.amplitudes() == state.amplitudes());
}

TEST_CASE("crank-nicolson conserves the norm of linear Hermitian evolution") {
  const Grid grid(6.283185307179586, 64);
  const Hierarchy linear = preset("linear_schrodinger");
  const GridState state = normalized(one_particle_state(grid, [](double x) {
    return std::exp(kImaginaryUnit * x) + 0.5 * std::exp(-kImaginaryUnit * x) +
           cdouble(0.25, 0.0);
  }));

  const EvolutionMap map{&linear, Integrator::CrankNicolson, 1e-3, 200};
  const GridState out = evolve(map, state);
  CHECK(std::abs(out.l2_norm() - state.l2_norm()) < 1e-12);

  const Hierarchy cubic = preset("cubic_nls");
  const EvolutionMap bad{&cubic, Integrator::CrankNicolson, 1e-3, 1};
  CHECK_THROWS_AS(evolve(bad, state), ShapeError);
}

TEST_CASE("evolution is grid-translation equivariant") {
  const Grid grid(6.283185307179586, 8);
  const Hierarchy free = preset("free_schrodinger");
  const GridState state = random_state(grid, 2, 1, 5);
  const EvolutionMap map{&free, Integrator::RK4, 1e-5, 10};

  const GridState a = evolve(map, translate(state, 1));
  const GridState b = translate(evolve(map, state), 1);
  const double scale = b.amplitudes().cwiseAbs().maxCoeff();
  CHECK((a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("separation gaps at grid level") {
  const Grid grid(6.283185307179586, 32);
  const auto [phi, psi] = standard_gap_pair(grid);

  SUBCASE("linear preset separates for both products") {
    const Hierarchy linear = preset("linear_schrodinger");
    CHECK(separation_gap(linear, phi, psi, 0.01, 1e-4, ProductKind::Plain) < 1e-6);
    CHECK(separation_gap(linear, phi, psi, 0.01, 1e-4, ProductKind::Sym) < 1e-6);
  }

  SUBCASE("doebner-goldin separates plainly but not under the sym product") {
    const Hierarchy dg = preset("doebner_goldin(0.3)");
    const double plain =
        separation_gap(dg, phi, psi, 0.01, 1e-4, ProductKind::Plain);
    const double sym = separation_gap(dg, phi, psi, 0.01, 1e-4, ProductKind::Sym);
    CHECK(plain < 1e-4);   // frozen regression bound
    CHECK(sym > 1e-3);
    CHECK(sym > 100.0 * plain);
  }
}

TEST_CASE("schmidt gap") {
  const Grid grid(6.283185307179586, 32);

  SUBCASE("products are rank one") {
    const GridState phi = random_state(grid, 1, 1, 7);
    const GridState psi = random_state(grid, 1, 1, 8);
    CHECK(schmidt_gap(simple_tensor(phi, psi)) < 1e-12);
  }

  SUBCASE("antisymmetric product of orthonormal factors gives exactly 1/2") {
    const GridState phi = one_particle_state(
        grid, [](double x) { return std::exp(kImaginaryUnit * x); });
    const GridState psi = one_particle_state(
        grid, [](double x) { return std::exp(kImaginaryUnit * (2.0 * x)); });
    const GridState pair = sym_tensor(phi, psi, Statistics(1));
    CHECK(std::abs(schmidt_gap(pair) - 0.5) < 1e-12);
  }

  SUBCASE("doebner-goldin keeps the plain product nearly rank one (measured)") {
    const Hierarchy dg = preset("doebner_goldin(0.3)");
    const auto [phi, psi] = standard_gap_pair(grid);
    const EvolutionMap map{&dg, Integrator::RK4, 1e-4, 100};
    const GridState evolved = evolve(map, simple_tensor(phi, psi));
    const double gap = schmidt_gap(evolved);
    CHECK(gap >= 0.0);
    CHECK(gap < 1.0);  // reading, not an assertion of exact zero
  }

  SUBCASE("zero and misshaped states are rejected") {
    CHECK_THROWS_AS(schmidt_gap(GridState(grid, 2, 1)), ShapeError);
    CHECK_THROWS_AS(schmidt_gap(random_state(grid, 1, 1, 9)), ShapeError);
  }
}

TEST_CASE("singular bodies report amplitude-floor violations with location") {
  const Grid grid(6.283185307179586, 16);
  const Hierarchy dg = preset("doebner_goldin(0.3)");
  // sin(x) vanishes at the grid origin, which the density denominator hits.
  const GridState bad =
      one_particle_state(grid, [](double x) { return cdouble(std::sin(x), 0.0); });
  const EvolutionMap map{&dg, Integrator::RK4, 1e-4, 3};
  try {
    evolve(map, bad);
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(err.step == 0);
    CHECK(err.point == 0);
  }
}

TEST_CASE("csv snapshot layout") {
  const Grid grid(6.283185307179586, 8);
  GridState state(grid, 1, 1);
  state[3] = cdouble(0.25, -0.5);
  std::ostringstream out;
  write_csv(state, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "i1,re,im");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 8);
  CHECK(out.str().find("3,0.25,-0.5") != std::string::npos);
}

TEST_CASE("evolution maps validate their inputs") {
  const Grid grid(6.283185307179586, 8);
  const GridState one = random_state(grid, 1, 1, 11);
  const Hierarchy linear = preset("linear_schrodinger");

  EvolutionMap bad{&linear, Integrator::RK4, -1.0, 10};
  CHECK_THROWS_AS(evolve(bad, one), ShapeError);

  const Hierarchy wide = make_preset("linear_schrodinger", JetSpec{1, 2, 2},
                                     Statistics(0), 2);
  const EvolutionMap mismatched{&wide, Integrator::RK4, 1e-4, 1};
  CHECK_THROWS_AS(evolve(mismatched, one), ShapeError);

  // Orders above 2 have no grid stencil.
  Hierarchy high;
  high.spec = JetSpec{1, 3, 1};
  high.operators[1].push_back(parse_operator("u[0]((3))"));
  finalize_hierarchy(high);
  const EvolutionMap unsupported{&high, Integrator::RK4, 1e-4, 1};
  CHECK_THROWS_AS(evolve(unsupported, one), DomainError);
}
