#pragma once

#include "sephier/evolution.hpp"

namespace sephier {

/// Pointwise nonlinear gauge transformation N acting on modulus and phase,
/// S -> lambda S + gamma ln R; the minimal invertible family of its kind.
struct GaugeParams {
  double gamma = 0.0;
  double lambda = 1.0;
};

enum class GaugeDirection { Forward, Inverse };

/// Applies N (or its inverse) pointwise to a scalar nowhere-vanishing state.
/// The modulus is untouched. For lambda != 1 the phase is unwrapped along the
/// grid: jumps above pi/2 and nonzero winding are rejected.
GridState apply_gauge(const GaugeParams& params, const GridState& state,
                      GaugeDirection direction);

/// Deformed tensor product N(N^-1 phi (x)^ N^-1 psi); the intermediate
/// symmetrized product must be nowhere-vanishing.
GridState deformed_tensor(const GaugeParams& params, const GridState& phi,
                          const GridState& psi, Statistics stats);

/// Generator H' of the conjugated evolution N E(t) N^-1, computed as
/// (1/i) d/dt N(E(t)(N^-1 Psi)) at t = 0 by central differences with two
/// single RK4 steps of size +-dt.
GridState deformed_generator(const GaugeParams& params,
                             const Hierarchy& hierarchy, const GridState& state,
                             double dt);

/// Separation gap of the gauged hierarchy E' = N E N^-1 with respect to the
/// deformed product, computed entirely in the undeformed frame.
double deformed_separation_gap(const GaugeParams& params,
                               const Hierarchy& hierarchy, const GridState& phi,
                               const GridState& psi, double t, double dt);

/// Separation gap of the gauged hierarchy measured against the undeformed
/// (anti-)symmetrized product.
double gauged_sym_gap(const GaugeParams& params, const Hierarchy& hierarchy,
                      const GridState& phi, const GridState& psi, double t,
                      double dt);

/// Nowhere-vanishing pair phi = normalize(1 + 0.5 e^{ix}),
/// psi = normalize(1 + 0.5 e^{-ix}); the stronger amplitude modulation makes
/// the gauged hierarchy's nonlinearity visible at short times.
std::pair<GridState, GridState> gauge_demo_pair(const Grid& grid);

}  // namespace sephier
