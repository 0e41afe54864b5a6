#pragma once

#include <string>

#include "icf/dense.hpp"

namespace icf {

/// Where the contact potential V0*delta(x) lands on the grid.
///
/// The origin sits halfway between sites N/2-1 and N/2. `split_pair` puts
/// V0/(2a) on both of them; `single_site` puts V0/a on site N/2, i.e. a delta
/// at x = a/2, which on a periodic ring differs from the origin only by a
/// translation. Both integrate to V0 under the trapezoidal rule.
enum class DeltaPlacement { split_pair, single_site };

/// Trapped 1D particle on a periodic ring of N grid points.
struct LatticeConfig {
  Index N = 2;
  double L = 1.0;
  double m = 1.0;
  double V0 = 0.0;
  DeltaPlacement placement = DeltaPlacement::split_pair;

  /// a = L / (N - 1)
  double spacing() const { return L / static_cast<double>(N - 1); }

  /// Throws ConfigError unless N >= 2, L > 0, m > 0 and V0 is finite.
  void validate() const;
};

enum class Basis { coordinate, momentum, field };
enum class Rotation { none, iL };

struct HamiltonianMatrix {
  MatrixXc entries;
  Basis basis = Basis::coordinate;
  Rotation rotation = Rotation::none;
  bool hermitian = true;

  Index dim() const { return entries.rows(); }
  std::string describe() const;
};

std::string to_string(Basis b);
std::string to_string(DeltaPlacement p);
DeltaPlacement parse_placement(const std::string& name);

/// Discretized contact potential V(x_alpha) for the coordinate grid.
/// Requires even N.
VectorXr contact_potential(const LatticeConfig& cfg);

/// Momentum modes k_n = (2 pi / L)(-N/2 + n), n = 0..N-1.
VectorXr momentum_modes(const LatticeConfig& cfg);

/// Free hopping part of the coordinate Hamiltonian on the periodic ring:
/// -1/(2 m a^2) between neighbours, 1/(m a^2) on the diagonal.
MatrixXr ring_kinetic(const LatticeConfig& cfg);

/// Coordinate-space Hamiltonian, periodic wraparound |N> = |0>.
/// `interacting = false` drops the contact potential.
HamiltonianMatrix build_coordinate_hamiltonian(const LatticeConfig& cfg, bool interacting);

/// Truncated momentum-space Hamiltonian: diag(k^2 / 2m) + V0/L on every entry.
HamiltonianMatrix build_momentum_hamiltonian(const LatticeConfig& cfg, bool interacting);

/// Coordinate Hamiltonian continued to an imaginary box size (a -> i a):
/// hopping +1/(2 m a^2), diagonal -(1/(m a^2) + i V(x_alpha)).
HamiltonianMatrix build_iL_rotated_hamiltonian(const LatticeConfig& cfg, bool interacting);

}  // namespace icf
