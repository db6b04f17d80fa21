#include <doctest.h>

#include "sephier/gauge.hpp"
#include "sephier/rng.hpp"

using namespace sephier;

namespace {

const Grid kGrid{6.283185307179586, 32};
const JetSpec kSpec{1, 2, 1};

// Nowhere-vanishing zero-winding state with both amplitude and phase texture.
GridState textured_state(double amp = 0.3, double phase = 0.4) {
  return one_particle_state(kGrid, [=](double x) {
    return (1.1 + amp * std::sin(x)) *
           std::exp(kImaginaryUnit * (phase * std::cos(x)));
  });
}

double max_rel_diff(const GridState& a, const GridState& b) {
  const double scale = b.amplitudes().cwiseAbs().maxCoeff();
  return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

TEST_CASE("gauge transformation basics") {
  const GridState state = textured_state();

  SUBCASE("gamma = 0, lambda = 1 is the identity") {
    const GridState out =
        apply_gauge(GaugeParams{0.0, 1.0}, state, GaugeDirection::Forward);
    CHECK(out.amplitudes() == state.amplitudes());
  }

  SUBCASE("inverse undoes forward, lambda = 1 and lambda != 1") {
    for (double lambda : {1.0, 0.7}) {
      const GaugeParams params{0.35, lambda};
      const GridState round =
          apply_gauge(params, apply_gauge(params, state, GaugeDirection::Forward),
                      GaugeDirection::Inverse);
      CHECK(max_rel_diff(round, state) < 1e-10);
    }
  }

  SUBCASE("the modulus is untouched up to rounding") {
    const GridState out =
        apply_gauge(GaugeParams{0.8, 1.0}, state, GaugeDirection::Forward);
    double worst = 0.0;
    for (long k = 0; k < state.size(); ++k)
      worst = std::max(worst, std::abs(std::abs(out[k]) - std::abs(state[k])) /
                                  std::abs(state[k]));
    CHECK(worst < 4e-16);
  }

  SUBCASE("group action in gamma at lambda = 1") {
    const GaugeParams g1{0.3, 1.0}, g2{0.45, 1.0}, sum{0.75, 1.0};
    const GridState composed =
        apply_gauge(g1, apply_gauge(g2, state, GaugeDirection::Forward),
                    GaugeDirection::Forward);
    const GridState direct = apply_gauge(sum, state, GaugeDirection::Forward);
    CHECK(max_rel_diff(composed, direct) < 1e-10);
  }
}

TEST_CASE("gauge transformation rejections") {
  SUBCASE("states with a vanishing amplitude") {
    const GridState zeroed =
        one_particle_state(kGrid, [](double x) { return cdouble(std::sin(x), 0.0); });
    CHECK_THROWS_AS(
        apply_gauge(GaugeParams{0.3, 1.0}, zeroed, GaugeDirection::Forward),
        DomainError);
  }

  SUBCASE("lambda = 0 is not invertible") {
    CHECK_THROWS_AS(apply_gauge(GaugeParams{0.3, 0.0}, textured_state(),
                                GaugeDirection::Forward),
                    ShapeError);
  }

  SUBCASE("nonzero winding has no branch for lambda != 1") {
    const GridState winding = one_particle_state(
        kGrid, [](double x) { return std::exp(kImaginaryUnit * x); });
    CHECK_THROWS_AS(
        apply_gauge(GaugeParams{0.1, 0.5}, winding, GaugeDirection::Forward),
        DomainError);
  }

  SUBCASE("adjacent phase jumps above pi/2 are flagged") {
    GridState jumpy(kGrid, 1, 1);
    for (int k = 0; k < kGrid.points; ++k)
      jumpy[k] = std::polar(1.0, (k % 2) ? 2.0 : 0.0);  // jumps of 2 rad
    CHECK_THROWS_AS(
        apply_gauge(GaugeParams{0.1, 0.5}, jumpy, GaugeDirection::Forward),
        DomainError);
  }

  SUBCASE("internal components are not supported") {
    const GridState wide = random_state(kGrid, 1, 2, 3);
    CHECK_THROWS_AS(
        apply_gauge(GaugeParams{0.1, 1.0}, wide, GaugeDirection::Forward),
        ShapeError);
  }
}

TEST_CASE("deformed tensor product") {
  const auto [phi, psi] = gauge_demo_pair(kGrid);
  const Statistics bose(0);

  SUBCASE("gamma = 0, lambda = 1 reduces to the sym product") {
    const GridState deformed = deformed_tensor(GaugeParams{0.0, 1.0}, phi, psi, bose);
    const GridState plain = sym_tensor(phi, psi, bose);
    CHECK(max_rel_diff(deformed, plain) < 1e-14);
  }

  SUBCASE("undoing the outer gauge recovers the sym product of ungauged factors") {
    const GaugeParams params{0.4, 1.0};
    const GridState deformed = deformed_tensor(params, phi, psi, bose);
    const GridState undone = apply_gauge(params, deformed, GaugeDirection::Inverse);
    const GridState expected =
        sym_tensor(apply_gauge(params, phi, GaugeDirection::Inverse),
                   apply_gauge(params, psi, GaugeDirection::Inverse), bose);
    CHECK(max_rel_diff(undone, expected) < 1e-10);
  }

  SUBCASE("modulus equals the modulus of the inner sym product") {
    const GaugeParams params{0.4, 1.0};
    const GridState deformed = deformed_tensor(params, phi, psi, bose);
    const GridState inner =
        sym_tensor(apply_gauge(params, phi, GaugeDirection::Inverse),
                   apply_gauge(params, psi, GaugeDirection::Inverse), bose);
    double worst = 0.0;
    for (long k = 0; k < deformed.size(); ++k)
      worst = std::max(worst, std::abs(std::abs(deformed[k]) - std::abs(inner[k])));
    CHECK(worst < 1e-14);
  }

  SUBCASE("vanishing intermediate products are reported") {
    // Antisymmetrized square vanishes identically on the diagonal.
    CHECK_THROWS_AS(deformed_tensor(GaugeParams{0.3, 1.0}, phi, phi, Statistics(1)),
                    DomainError);
  }
}

TEST_CASE("deformed generator") {
  const Hierarchy linear = make_preset("linear_schrodinger", kSpec, Statistics(0), 2);
  const GridState state = normalized(textured_state());

  SUBCASE("gamma = 0 recovers the plain generator to O(dt^2)") {
    const GridState direct = apply_generator(linear, state);
    const GridState via_map =
        deformed_generator(GaugeParams{0.0, 1.0}, linear, state, 1e-3);
    CHECK(max_rel_diff(via_map, direct) < 1e-5);
  }

  SUBCASE("the gauged generator is nonlinear") {
    const GaugeParams params{0.3, 1.0};
    GridState doubled = state;
    doubled.amplitudes() *= 2.0;
    const GridState h_doubled = deformed_generator(params, linear, doubled, 1e-4);
    GridState h_scaled = deformed_generator(params, linear, state, 1e-4);
    h_scaled.amplitudes() *= 2.0;
    const double deviation = max_rel_diff(h_doubled, h_scaled);
    CHECK(deviation > 0.01);
  }

  SUBCASE("chain-rule oracle at lambda = 1") {
    // d/dt N(E(t) Phi0) = DN|_Phi0 [i H(Phi0)] with
    // DN|_Phi(V) = e^{i gamma ln|Phi|} (V + i gamma Phi Re(conj(Phi) V)/|Phi|^2).
    const GaugeParams params{0.3, 1.0};
    const GridState phi0 = apply_gauge(params, state, GaugeDirection::Inverse);
    GridState h_phi0 = apply_generator(linear, phi0);
    h_phi0.amplitudes() *= kImaginaryUnit;

    GridState oracle(kGrid, 1, 1);
    for (long k = 0; k < oracle.size(); ++k) {
      const cdouble p = phi0[k], v = h_phi0[k];
      const cdouble scale = std::exp(kImaginaryUnit * (params.gamma * std::log(std::abs(p))));
      const cdouble dn = scale * (v + kImaginaryUnit * params.gamma * p *
                                          (std::real(std::conj(p) * v) / std::norm(p)));
      oracle[k] = dn / kImaginaryUnit;
    }

    const double dt = 1e-3;
    const GridState numeric = deformed_generator(params, linear, state, dt);
    CHECK(max_rel_diff(numeric, oracle) < 1e-4);  // O(dt^2) agreement
    const GridState finer = deformed_generator(params, linear, state, dt / 4.0);
    CHECK(max_rel_diff(finer, oracle) < max_rel_diff(numeric, oracle) / 8.0);
  }
}

TEST_CASE("deformed and undeformed separation gaps") {
  const Hierarchy linear = make_preset("linear_schrodinger", kSpec, Statistics(0), 2);
  const auto [phi, psi] = gauge_demo_pair(kGrid);

  SUBCASE("gamma = 0 reduces to the plain sym gap") {
    const double a =
        deformed_separation_gap(GaugeParams{0.0, 1.0}, linear, phi, psi, 0.01, 1e-4);
    const double b = separation_gap(linear, phi, psi, 0.01, 1e-4, ProductKind::Sym);
    CHECK(std::abs(a - b) < 1e-14);
  }

  SUBCASE("gauged linear hierarchy separates for the deformed product only") {
    const GaugeParams params{0.3, 1.0};
    const double deformed =
        deformed_separation_gap(params, linear, phi, psi, 0.01, 1e-4);
    const double undeformed = gauged_sym_gap(params, linear, phi, psi, 0.01, 1e-4);
    CHECK(deformed < 1e-5);
    CHECK(undeformed > 1e-3);
  }

  SUBCASE("conjugation bookkeeping identity") {
    const GaugeParams params{0.3, 1.0};
    const EvolutionMap map{&linear, Integrator::RK4, 1e-4, 50};
    const GridState lhs = apply_gauge(
        params,
        evolve(map, apply_gauge(params, deformed_tensor(params, phi, psi, linear.stats),
                                GaugeDirection::Inverse)),
        GaugeDirection::Forward);
    const GridState rhs = apply_gauge(
        params,
        evolve(map, sym_tensor(apply_gauge(params, phi, GaugeDirection::Inverse),
                               apply_gauge(params, psi, GaugeDirection::Inverse),
                               linear.stats)),
        GaugeDirection::Forward);
    CHECK(max_rel_diff(lhs, rhs) < 1e-10);
  }
}
