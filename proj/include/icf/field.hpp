#pragma once

#include <optional>
#include <string>

#include "icf/dense.hpp"
#include "icf/lattice.hpp"
#include "icf/pauli.hpp"

namespace icf {

/// phi^4 on N_x periodic sites, each carrying a field register of N_phi
/// values phi_alpha = -phi_max/2 + a_phi alpha.
struct FieldLatticeConfig {
  Index Nx = 1;
  double L = 1.0;
  double m = 1.0;
  double lambda = 0.0;
  Index Nphi = 2;
  double phi_max = 12.0;
  /// Spatial spacing. Required for N_x = 1, where L / (N_x - 1) is undefined.
  std::optional<double> spacing_override;

  double spacing() const;
  double field_spacing() const { return phi_max / static_cast<double>(Nphi - 1); }
  Index dimension() const;
  void validate(Index max_dim = 4096) const;
};

enum class FieldConvention { canonical, as_printed };

std::string to_string(FieldConvention c);
FieldConvention parse_field_convention(const std::string& name);

struct PhiOperator {
  PauliSum terms;      ///< a_phi * U_phi as Pauli terms
  VectorXr diagonal;   ///< phi_alpha
};

/// phi on one site of 2^gamma field values spaced a_phi.
PhiOperator build_phi_operator(int gamma_phi, double a_phi = 1.0);

/// One-site operator (N_phi x N_phi), periodic in alpha.
///   canonical:  1/2 Pi^2 + 1/2 m^2 phi^2 + lambda/4! phi^4
///   as_printed: H^(a+b) + H^(ho) + H^(v), hopping -1/(2 m a_phi^2),
///               diagonal 1/(m a_phi^2) + 1/2 (m^2 + 2/a_phi^2) phi^2 + lambda/4! phi^4
MatrixXr field_local_hamiltonian(const FieldLatticeConfig& cfg, FieldConvention conv);

/// Diagonal part of the one-site operator built from powers of U_phi.
PauliSum field_local_diagonal_terms(const FieldLatticeConfig& cfg, FieldConvention conv);

/// Full Hamiltonian on N_phi^N_x states, site 0 the least significant
/// digit. canonical adds a/(2a^2) (phi_{j+1} - phi_j)^2 per bond;
/// as_printed adds (a / a_phi^2) phi_{j+1} phi_j. Bonds wrap around.
HamiltonianMatrix build_field_hamiltonian(const FieldLatticeConfig& cfg, FieldConvention conv);

struct FieldConventionDiff {
  double max_abs = 0;       ///< max |H_canonical - H_as_printed|
  double hopping = 0;       ///< off-diagonal single-site part
  double onsite = 0;        ///< diagonal single-site part
  double coupling = 0;      ///< nearest-neighbour part
  VectorXr low_canonical;   ///< lowest eigenvalues, canonical
  VectorXr low_as_printed;  ///< lowest eigenvalues, as_printed
  std::string report() const;
};

/// Both conventions on the same config, split into their three pieces.
FieldConventionDiff compare_field_conventions(const FieldLatticeConfig& cfg, Index levels = 4);

}  // namespace icf
