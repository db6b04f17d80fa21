#include "sephier/grid.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "sephier/rng.hpp"

namespace sephier {

Grid::Grid(double L, int n) : length(L), points(n) {
  if (!(L > 0.0)) throw ShapeError("Grid: length must be > 0");
  if (n < 8) throw ShapeError("Grid: at least 8 points required");
}

namespace {

long pow_long(long base, int exp) {
  long r = 1;
  for (int k = 0; k < exp; ++k) r *= base;
  return r;
}

}  // namespace

GridState::GridState(Grid grid, int particles, int internal_dim)
    : grid_(grid), particles_(particles), internal_dim_(internal_dim) {
  if (particles < 1) throw ShapeError("GridState: particles must be >= 1");
  if (internal_dim < 1) throw ShapeError("GridState: internal_dim must be >= 1");
  amp_ = Eigen::VectorXcd::Zero(pow_long(slot_basis(), particles));
}

void GridState::decode(long flat, std::vector<long>& digits) const {
  digits.resize(static_cast<std::size_t>(particles_));
  const long base = slot_basis();
  for (int j = particles_ - 1; j >= 0; --j) {
    digits[static_cast<std::size_t>(j)] = flat % base;
    flat /= base;
  }
}

long GridState::encode(const std::vector<long>& digits) const {
  const long base = slot_basis();
  long flat = 0;
  for (long d : digits) flat = flat * base + d;
  return flat;
}

double GridState::l2_norm() const {
  const double cell = std::pow(grid_.spacing(), particles_);
  return std::sqrt(cell * amp_.squaredNorm());
}

GridState one_particle_state(const Grid& grid,
                             const std::function<cdouble(double)>& f) {
  GridState state(grid, 1, 1);
  for (int i = 0; i < grid.points; ++i) state[i] = f(grid.coord(i));
  return state;
}

GridState one_particle_state(const Grid& grid, int internal_dim,
                             const std::function<Eigen::VectorXcd(double)>& f) {
  GridState state(grid, 1, internal_dim);
  for (int i = 0; i < grid.points; ++i) {
    const Eigen::VectorXcd v = f(grid.coord(i));
    for (int a = 0; a < internal_dim; ++a) state[i * internal_dim + a] = v(a);
  }
  return state;
}

GridState random_state(const Grid& grid, int particles, int internal_dim,
                       std::uint64_t seed) {
  GridState state(grid, particles, internal_dim);
  std::mt19937_64 rng(seed);
  for (long k = 0; k < state.size(); ++k)
    state[k] = cdouble(uniform_pm1(rng), uniform_pm1(rng));
  return state;
}

GridState normalized(GridState state) {
  const double norm = state.l2_norm();
  if (!(norm > 0.0)) throw ShapeError("normalized: zero state");
  state.amplitudes() /= norm;
  return state;
}

GridState permute_slots(const GridState& state, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != state.particles())
    throw ShapeError("permute_slots: permutation size must equal particle count");
  GridState out(state.grid(), state.particles(), state.internal_dim());
  std::vector<long> digits, permuted(perm.size());
  for (long flat = 0; flat < out.size(); ++flat) {
    out.decode(flat, digits);
    for (std::size_t j = 0; j < perm.size(); ++j)
      permuted[j] = digits[static_cast<std::size_t>(perm[j])];
    out[flat] = state[state.encode(permuted)];
  }
  return out;
}

GridState translate(const GridState& state, int cells) {
  const int n = state.grid().points;
  const int m = state.internal_dim();
  GridState out(state.grid(), state.particles(), state.internal_dim());
  std::vector<long> digits;
  for (long flat = 0; flat < out.size(); ++flat) {
    out.decode(flat, digits);
    for (long& d : digits) {
      const long i = d / m, a = d % m;
      const long shifted = ((i - cells) % n + n) % n;
      d = shifted * m + a;
    }
    out[flat] = state[state.encode(digits)];
  }
  return out;
}

void write_csv(const GridState& state, std::ostream& out) {
  const int p = state.particles();
  const int m = state.internal_dim();
  for (int j = 1; j <= p; ++j) out << "i" << j << ",";
  if (m > 1)
    for (int j = 1; j <= p; ++j) out << "a" << j << ",";
  out << "re,im\n";
  std::vector<long> digits;
  out.precision(17);
  for (long flat = 0; flat < state.size(); ++flat) {
    state.decode(flat, digits);
    for (long d : digits) out << d / m << ",";
    if (m > 1)
      for (long d : digits) out << d % m << ",";
    const cdouble v = state[flat];
    out << v.real() << "," << v.imag() << "\n";
  }
}

}  // namespace sephier
