#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "sephier/common.hpp"

namespace sephier {

/// Periodic 1-D grid (one spatial dimension per particle), spacing L/n.
struct Grid {
  double length = 2.0 * 3.14159265358979323846;
  int points = 64;

  Grid() = default;
  Grid(double L, int n);

  double spacing() const { return length / points; }
  double coord(int i) const { return spacing() * i; }

  bool operator==(const Grid&) const = default;
};

/// Discretized p-particle wavefunction with m internal components per
/// particle. Flat layout: per-particle digit xi_j = i_j * m + A_j, slot 0 most
/// significant, so the amplitude vector has (n*m)^p entries.
class GridState {
 public:
  GridState(Grid grid, int particles, int internal_dim);

  const Grid& grid() const { return grid_; }
  int particles() const { return particles_; }
  int internal_dim() const { return internal_dim_; }

  /// Size of one particle digit, n*m.
  long slot_basis() const { return static_cast<long>(grid_.points) * internal_dim_; }
  long size() const { return amp_.size(); }

  const Eigen::VectorXcd& amplitudes() const { return amp_; }
  Eigen::VectorXcd& amplitudes() { return amp_; }

  cdouble operator[](long flat) const { return amp_(flat); }
  cdouble& operator[](long flat) { return amp_(flat); }

  /// Decode a flat index into per-particle digits xi_j (most significant first).
  void decode(long flat, std::vector<long>& digits) const;
  long encode(const std::vector<long>& digits) const;

  /// L2 norm under the rectangle rule, sqrt(h^p * sum |psi|^2).
  double l2_norm() const;

 private:
  Grid grid_;
  int particles_;
  int internal_dim_;
  Eigen::VectorXcd amp_;
};

/// One-particle scalar state from a function of the grid coordinate.
GridState one_particle_state(const Grid& grid,
                             const std::function<cdouble(double)>& f);

/// One-particle state with internal components from f(x) -> m values.
GridState one_particle_state(const Grid& grid, int internal_dim,
                             const std::function<Eigen::VectorXcd(double)>& f);

/// Independent uniform complex amplitudes in the unit square, deterministic
/// per seed. Used by algebraic property tests; no smoothness implied.
GridState random_state(const Grid& grid, int particles, int internal_dim,
                       std::uint64_t seed);

/// Scales the state to unit L2 norm. Throws on a zero state.
GridState normalized(GridState state);

/// Applies a particle-slot permutation: out(xi_0,..) = in(xi_{perm[0]},..).
GridState permute_slots(const GridState& state, const std::vector<int>& perm);

/// Translates every particle coordinate by the given number of cells
/// (periodic); internal digits are untouched.
GridState translate(const GridState& state, int cells);

/// CSV snapshot: one row per amplitude, columns
/// i_1,..,i_p[,a_1,..,a_p],re,im. Internal columns only when m > 1.
void write_csv(const GridState& state, std::ostream& out);

}  // namespace sephier
