#include "sephier/evolution.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace sephier {

namespace {

// Binds jet variables to centered finite-difference stencils of the state at
// one grid point. Supports derivative orders 0, 1, 2 per slot (d = 1).
class GridBinding final : public JetBinding {
 public:
  GridBinding(const GridState& state) : state_(state) {
    const double h = state.grid().spacing();
    inv_2h_ = 1.0 / (2.0 * h);
    inv_h2_ = 1.0 / (h * h);
    point_.resize(static_cast<std::size_t>(state.particles()));
    digits_.resize(static_cast<std::size_t>(state.particles()));
  }

  void set_point(const std::vector<long>& point) { point_ = point; }

  cdouble jet_value(const JetVarRef& ref, int pos) const override {
    if (static_cast<int>(ref.internals.size()) != state_.particles())
      throw DomainError("jet variable arity does not match the state", pos);
    return accumulate(ref, 0, 1.0, pos);
  }

  double coordinate(int particle, int) const override {
    return state_.grid().coord(
        static_cast<int>(point_[static_cast<std::size_t>(particle)]));
  }

 private:
  cdouble accumulate(const JetVarRef& ref, int slot, double weight,
                     int pos) const {
    if (slot == state_.particles()) {
      return weight * state_[state_.encode(digits_)];
    }
    const int n = state_.grid().points;
    const int m = state_.internal_dim();
    const long i = point_[static_cast<std::size_t>(slot)];
    const int a = ref.internals[static_cast<std::size_t>(slot)];
    auto at_offset = [&](long off) {
      return (((i + off) % n + n) % n) * m + a;
    };
    const int order = ref.orders[static_cast<std::size_t>(slot)](0);
    cdouble acc = 0.0;
    switch (order) {
      case 0:
        digits_[static_cast<std::size_t>(slot)] = at_offset(0);
        acc = accumulate(ref, slot + 1, weight, pos);
        break;
      case 1:
        digits_[static_cast<std::size_t>(slot)] = at_offset(1);
        acc = accumulate(ref, slot + 1, weight * inv_2h_, pos);
        digits_[static_cast<std::size_t>(slot)] = at_offset(-1);
        acc += accumulate(ref, slot + 1, -weight * inv_2h_, pos);
        break;
      case 2:
        digits_[static_cast<std::size_t>(slot)] = at_offset(1);
        acc = accumulate(ref, slot + 1, weight * inv_h2_, pos);
        digits_[static_cast<std::size_t>(slot)] = at_offset(0);
        acc += accumulate(ref, slot + 1, -2.0 * weight * inv_h2_, pos);
        digits_[static_cast<std::size_t>(slot)] = at_offset(-1);
        acc += accumulate(ref, slot + 1, weight * inv_h2_, pos);
        break;
      default:
        throw DomainError("grid stencils cover derivative orders 0..2 only", pos);
    }
    return acc;
  }

  const GridState& state_;
  double inv_2h_ = 0.0;
  double inv_h2_ = 0.0;
  mutable std::vector<long> point_;
  mutable std::vector<long> digits_;
};

void check_grid_compatible(const Hierarchy& hierarchy, const GridState& state) {
  if (hierarchy.spec.d != 1)
    throw ShapeError("grid evolution requires a d = 1 hierarchy");
  if (hierarchy.spec.m != state.internal_dim())
    throw ShapeError("internal dimension mismatch between hierarchy and state");
  if (!hierarchy.has_arity(state.particles()))
    throw ShapeError("hierarchy does not provide arity " +
                     std::to_string(state.particles()));
}

void check_amplitude_floor(const GridState& state, long step) {
  for (long k = 0; k < state.size(); ++k) {
    if (std::abs(state[k]) < kAmplitudeFloor) {
      DomainError err("state amplitude fell below the floor " +
                          std::to_string(kAmplitudeFloor) +
                          " inside a singular nonlinear body",
                      0);
      err.step = step;
      err.point = k;
      throw err;
    }
  }
}

bool hierarchy_is_singular(const Hierarchy& hierarchy, int arity) {
  for (const ExprPtr& body : hierarchy.arity(arity))
    if (has_jet_singularity(*body)) return true;
  return false;
}

}  // namespace

GridState apply_generator(const Hierarchy& hierarchy, const GridState& state) {
  check_grid_compatible(hierarchy, state);
  const int p = state.particles();
  const int m = state.internal_dim();
  const std::vector<ExprPtr>& bodies = hierarchy.arity(p);

  GridState out(state.grid(), p, m);
  GridBinding binding(state);
  const EvalOptions options{kAmplitudeFloor * kAmplitudeFloor};

  std::vector<long> digits, point(static_cast<std::size_t>(p));
  std::vector<int> internal(static_cast<std::size_t>(p));
  for (long flat = 0; flat < out.size(); ++flat) {
    out.decode(flat, digits);
    for (int j = 0; j < p; ++j) {
      point[static_cast<std::size_t>(j)] = digits[static_cast<std::size_t>(j)] / m;
      internal[static_cast<std::size_t>(j)] =
          static_cast<int>(digits[static_cast<std::size_t>(j)] % m);
    }
    binding.set_point(point);
    const int component = encode_internal(internal, m);
    try {
      out[flat] = eval_expr(*bodies[static_cast<std::size_t>(component)],
                            binding, options);
    } catch (DomainError& err) {
      err.component = component;
      err.point = flat;
      throw;
    }
  }
  return out;
}

GridState rk4_step(const Hierarchy& hierarchy, const GridState& state,
                   double dt) {
  auto rhs = [&](const GridState& s) {
    GridState h = apply_generator(hierarchy, s);
    h.amplitudes() *= kImaginaryUnit;  // dPsi/dt = i H(Psi)
    return h;
  };
  GridState k1 = rhs(state);

  GridState stage = state;
  stage.amplitudes() += 0.5 * dt * k1.amplitudes();
  GridState k2 = rhs(stage);

  stage = state;
  stage.amplitudes() += 0.5 * dt * k2.amplitudes();
  GridState k3 = rhs(stage);

  stage = state;
  stage.amplitudes() += dt * k3.amplitudes();
  GridState k4 = rhs(stage);

  GridState out = state;
  out.amplitudes() += (dt / 6.0) * (k1.amplitudes() + 2.0 * k2.amplitudes() +
                                    2.0 * k3.amplitudes() + k4.amplitudes());
  return out;
}

namespace {

GridState evolve_crank_nicolson(const EvolutionMap& map, const GridState& state) {
  const Hierarchy& hierarchy = *map.hierarchy;
  if (!hierarchy.linear)
    throw ShapeError("Crank-Nicolson is restricted to linear hierarchies");
  const long dim = state.size();
  if (dim > 2048)
    throw ShapeError("Crank-Nicolson matrix assembly capped at dimension 2048");

  // Assemble H columnwise from basis states, then take Cayley steps
  // (1 - i dt/2 H)^-1 (1 + i dt/2 H), unitary for Hermitian H.
  Eigen::MatrixXcd h_matrix(dim, dim);
  GridState basis(state.grid(), state.particles(), state.internal_dim());
  for (long j = 0; j < dim; ++j) {
    basis.amplitudes().setZero();
    basis[j] = 1.0;
    h_matrix.col(j) = apply_generator(hierarchy, basis).amplitudes();
  }
  const cdouble half_step = kImaginaryUnit * (0.5 * map.dt);
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(dim, dim);
  const Eigen::MatrixXcd minus = identity - half_step * h_matrix;
  const Eigen::MatrixXcd plus = identity + half_step * h_matrix;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(minus);

  GridState out = state;
  for (int step = 0; step < map.steps; ++step)
    out.amplitudes() = lu.solve(plus * out.amplitudes());
  return out;
}

}  // namespace

GridState evolve(const EvolutionMap& map, const GridState& state) {
  if (map.hierarchy == nullptr) throw ShapeError("evolve: hierarchy missing");
  if (!(map.dt > 0.0)) throw ShapeError("evolve: dt must be > 0");
  if (map.steps < 0) throw ShapeError("evolve: steps must be >= 0");
  check_grid_compatible(*map.hierarchy, state);

  if (map.integrator == Integrator::CrankNicolson)
    return evolve_crank_nicolson(map, state);

  const bool singular = hierarchy_is_singular(*map.hierarchy, state.particles());
  GridState out = state;
  for (int step = 0; step < map.steps; ++step) {
    if (singular) check_amplitude_floor(out, step);
    try {
      out = rk4_step(*map.hierarchy, out, map.dt);
    } catch (DomainError& err) {
      err.step = step;
      throw;
    }
  }
  return out;
}

double separation_gap(const Hierarchy& hierarchy, const GridState& phi,
                      const GridState& psi, double t, double dt,
                      ProductKind product) {
  if (phi.particles() != 1 || psi.particles() != 1)
    throw ShapeError("separation_gap: factors must be one-particle states");
  const int steps = static_cast<int>(std::lround(t / dt));
  const EvolutionMap map{&hierarchy, Integrator::RK4, dt, steps};

  auto combine = [&](const GridState& a, const GridState& b) {
    return product == ProductKind::Plain ? simple_tensor(a, b)
                                         : sym_tensor(a, b, hierarchy.stats);
  };
  const GridState joint = evolve(map, combine(phi, psi));
  const GridState split = combine(evolve(map, phi), evolve(map, psi));

  GridState diff = joint;
  diff.amplitudes() -= split.amplitudes();
  const double denom = joint.l2_norm();
  if (!(denom > 0.0)) throw ShapeError("separation_gap: evolved product vanished");
  return diff.l2_norm() / denom;
}

double schmidt_gap(const GridState& state) {
  if (state.particles() != 2 || state.internal_dim() != 1)
    throw ShapeError("schmidt_gap: needs a scalar two-particle state");
  const int n = state.grid().points;
  Eigen::MatrixXcd coeff(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) coeff(i, j) = state[static_cast<long>(i) * n + j];
  const double total = coeff.squaredNorm();
  if (!(total > 0.0)) throw ShapeError("schmidt_gap: zero state");
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(coeff);
  const double top = svd.singularValues()(0);
  return 1.0 - top * top / total;
}

std::pair<GridState, GridState> standard_gap_pair(const Grid& grid) {
  GridState phi = normalized(one_particle_state(grid, [](double x) {
    return 1.0 + 0.3 * std::exp(kImaginaryUnit * x);
  }));
  GridState psi = normalized(one_particle_state(grid, [](double x) {
    return 1.0 + 0.3 * std::exp(-kImaginaryUnit * x);
  }));
  return {std::move(phi), std::move(psi)};
}

}  // namespace sephier
