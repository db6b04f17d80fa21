#pragma once

#include "sephier/grid.hpp"
#include "sephier/hierarchy.hpp"

namespace sephier {

/// States evolve by dPsi/dt = i H(Psi), matching the generator convention
/// H = (1/i) dE/dt of the evolution operators E(t). Spatial derivatives are
/// centered stencils on the periodic grid: [1,-2,1]/h^2 and [-1,0,1]/(2h).
enum class Integrator { RK4, CrankNicolson };

struct EvolutionMap {
  const Hierarchy* hierarchy = nullptr;
  Integrator integrator = Integrator::RK4;
  double dt = 1e-4;
  int steps = 100;
};

/// Amplitude floor for hierarchies with singular bodies (division or log of
/// jet-dependent values); crossing it raises DomainError with step and point.
inline constexpr double kAmplitudeFloor = 1e-8;

/// H(Psi) realized on the grid (no factor i). The hierarchy must be d = 1
/// with matching internal dimension and provide the state's arity.
GridState apply_generator(const Hierarchy& hierarchy, const GridState& state);

/// One classical RK4 step of dPsi/dt = i H(Psi); dt may be negative.
GridState rk4_step(const Hierarchy& hierarchy, const GridState& state,
                   double dt);

GridState evolve(const EvolutionMap& map, const GridState& state);

enum class ProductKind { Plain, Sym };

/// Relative evolution-level separation gap at time t:
/// || E_2(t)(phi x psi) - E_1(t)phi x E_1(t)psi || / || E_2(t)(phi x psi) ||
/// with the plain or (anti-)symmetrized product on both sides; both sides use
/// the same grid, stencils, RK4 integrator and dt.
double separation_gap(const Hierarchy& hierarchy, const GridState& phi,
                      const GridState& psi, double t, double dt,
                      ProductKind product);

/// 1 - sigma_1^2 / sum sigma_i^2 of the coefficient matrix of a scalar
/// two-particle state; 0 exactly for products.
double schmidt_gap(const GridState& state);

/// The nowhere-vanishing test pair phi = normalize(1 + 0.3 e^{ix}),
/// psi = normalize(1 + 0.3 e^{-ix}) used by gap demonstrations.
std::pair<GridState, GridState> standard_gap_pair(const Grid& grid);

}  // namespace sephier
