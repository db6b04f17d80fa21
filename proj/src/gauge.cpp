#include "sephier/gauge.hpp"

#include <cmath>

namespace sephier {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_gauge_state(const GaugeParams& params, const GridState& state) {
  if (params.lambda == 0.0)
    throw ShapeError("gauge transformation requires lambda != 0");
  if (state.internal_dim() != 1)
    throw ShapeError("gauge transformations act on scalar (m = 1) states");
  for (long k = 0; k < state.size(); ++k)
    if (std::abs(state[k]) < kAmplitudeFloor) {
      DomainError err("gauge transformation hit an amplitude below the floor", 0);
      err.point = k;
      throw err;
    }
}

double principal_delta(cdouble to, cdouble from) {
  return std::arg(to / from);
}

/// Unwraps the phase over the whole state: each point continues from its
/// predecessor along the least significant coordinate (falling back to the
/// parent row at boundaries). Jumps above pi/2 are rejected as ambiguous.
Eigen::VectorXd unwrap_phase(const GridState& state) {
  const int n = state.grid().points;
  const int p = state.particles();
  Eigen::VectorXd phase(state.size());
  phase(0) = std::arg(state[0]);

  std::vector<long> strides(static_cast<std::size_t>(p));
  strides[static_cast<std::size_t>(p - 1)] = 1;
  for (int j = p - 2; j >= 0; --j)
    strides[static_cast<std::size_t>(j)] = strides[static_cast<std::size_t>(j + 1)] * n;

  std::vector<long> digits;
  for (long k = 1; k < state.size(); ++k) {
    state.decode(k, digits);
    long ref = -1;
    for (int j = p - 1; j >= 0; --j)
      if (digits[static_cast<std::size_t>(j)] != 0) {
        ref = k - strides[static_cast<std::size_t>(j)];
        break;
      }
    const double delta = principal_delta(state[k], state[ref]);
    if (std::abs(delta) > 0.5 * kPi) {
      DomainError err("phase-unwrap ambiguity: adjacent phase jump exceeds pi/2", 0);
      err.point = k;
      throw err;
    }
    phase(k) = phase(ref) + delta;
  }

  // Reject nonzero winding around each periodic direction (ring through the
  // origin); a multivalued phase has no consistent branch under lambda != 1.
  for (int j = 0; j < p; ++j) {
    const long stride = strides[static_cast<std::size_t>(j)];
    double total = 0.0;
    for (int t = 0; t + 1 < n; ++t)
      total += principal_delta(state[(t + 1) * stride], state[t * stride]);
    total += principal_delta(state[0], state[(n - 1) * stride]);
    if (std::lround(total / (2.0 * kPi)) != 0)
      throw DomainError("gauge transformation rejects states with nonzero winding", 0);
  }
  return phase;
}

}  // namespace

GridState apply_gauge(const GaugeParams& params, const GridState& state,
                      GaugeDirection direction) {
  check_gauge_state(params, state);
  GridState out = state;

  if (params.lambda == 1.0) {
    // S -> S + gamma ln R needs no branch choice: multiply by e^{i gamma ln R}.
    const double gamma =
        direction == GaugeDirection::Forward ? params.gamma : -params.gamma;
    for (long k = 0; k < out.size(); ++k) {
      const double log_r = std::log(std::abs(state[k]));
      out[k] = state[k] * std::exp(kImaginaryUnit * (gamma * log_r));
    }
    return out;
  }

  const Eigen::VectorXd phase = unwrap_phase(state);
  for (long k = 0; k < out.size(); ++k) {
    const double r = std::abs(state[k]);
    const double s = phase(k);
    const double s_new =
        direction == GaugeDirection::Forward
            ? params.lambda * s + params.gamma * std::log(r)
            : (s - params.gamma * std::log(r)) / params.lambda;
    out[k] = std::polar(r, s_new);
  }
  return out;
}

GridState deformed_tensor(const GaugeParams& params, const GridState& phi,
                          const GridState& psi, Statistics stats) {
  const GridState phi_plain = apply_gauge(params, phi, GaugeDirection::Inverse);
  const GridState psi_plain = apply_gauge(params, psi, GaugeDirection::Inverse);
  const GridState product = sym_tensor(phi_plain, psi_plain, stats);
  try {
    return apply_gauge(params, product, GaugeDirection::Forward);
  } catch (DomainError& err) {
    throw DomainError(
        "deformed_tensor: the symmetrized product vanishes at flat index " +
            std::to_string(err.point),
        err.source_pos());
  }
}

GridState deformed_generator(const GaugeParams& params,
                             const Hierarchy& hierarchy, const GridState& state,
                             double dt) {
  if (!(dt > 0.0)) throw ShapeError("deformed_generator: dt must be > 0");
  const GridState undeformed = apply_gauge(params, state, GaugeDirection::Inverse);
  const GridState fwd = apply_gauge(params, rk4_step(hierarchy, undeformed, dt),
                                    GaugeDirection::Forward);
  const GridState bwd = apply_gauge(params, rk4_step(hierarchy, undeformed, -dt),
                                    GaugeDirection::Forward);
  GridState out = fwd;
  out.amplitudes() =
      (fwd.amplitudes() - bwd.amplitudes()) / (2.0 * dt * kImaginaryUnit);
  return out;
}

namespace {

double relative_gap(const GridState& reference, const GridState& other) {
  GridState diff = reference;
  diff.amplitudes() -= other.amplitudes();
  const double denom = reference.l2_norm();
  if (!(denom > 0.0)) throw ShapeError("gap: reference state vanished");
  return diff.l2_norm() / denom;
}

}  // namespace

double deformed_separation_gap(const GaugeParams& params,
                               const Hierarchy& hierarchy, const GridState& phi,
                               const GridState& psi, double t, double dt) {
  const int steps = static_cast<int>(std::lround(t / dt));
  const EvolutionMap map{&hierarchy, Integrator::RK4, dt, steps};

  // All evolutions run in the undeformed frame:
  // E'_2(phi (x)_N psi)        = N( E_2( N^-1 phi (x)^ N^-1 psi ) )
  // E'_1 phi (x)_N E'_1 psi    = N( E_1 N^-1 phi (x)^ E_1 N^-1 psi )
  const GridState phi_plain = apply_gauge(params, phi, GaugeDirection::Inverse);
  const GridState psi_plain = apply_gauge(params, psi, GaugeDirection::Inverse);

  const GridState joint = apply_gauge(
      params, evolve(map, sym_tensor(phi_plain, psi_plain, hierarchy.stats)),
      GaugeDirection::Forward);
  const GridState split = apply_gauge(
      params,
      sym_tensor(evolve(map, phi_plain), evolve(map, psi_plain), hierarchy.stats),
      GaugeDirection::Forward);
  return relative_gap(joint, split);
}

std::pair<GridState, GridState> gauge_demo_pair(const Grid& grid) {
  GridState phi = normalized(one_particle_state(grid, [](double x) {
    return 1.0 + 0.5 * std::exp(kImaginaryUnit * x);
  }));
  GridState psi = normalized(one_particle_state(grid, [](double x) {
    return 1.0 + 0.5 * std::exp(-kImaginaryUnit * x);
  }));
  return {std::move(phi), std::move(psi)};
}

double gauged_sym_gap(const GaugeParams& params, const Hierarchy& hierarchy,
                      const GridState& phi, const GridState& psi, double t,
                      double dt) {
  const int steps = static_cast<int>(std::lround(t / dt));
  const EvolutionMap map{&hierarchy, Integrator::RK4, dt, steps};

  auto gauged_evolve = [&](const GridState& s) {
    return apply_gauge(
        params, evolve(map, apply_gauge(params, s, GaugeDirection::Inverse)),
        GaugeDirection::Forward);
  };
  const GridState joint = gauged_evolve(sym_tensor(phi, psi, hierarchy.stats));
  const GridState split =
      sym_tensor(gauged_evolve(phi), gauged_evolve(psi), hierarchy.stats);
  return relative_gap(joint, split);
}

}  // namespace sephier
