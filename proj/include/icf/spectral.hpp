#pragma once

#include <string>
#include <vector>

#include "icf/analytic.hpp"
#include "icf/dense.hpp"
#include "icf/lattice.hpp"

namespace icf {

/// Eigenvalues of a trapped Hamiltonian, sorted by real part.
struct Spectrum {
  VectorXc eigenvalues;
  std::string source;
  bool hermitian = true;

  Index size() const { return eigenvalues.size(); }
};

/// Default eigen-solver size cap; callers may lift it explicitly.
inline constexpr Index kDefaultMaxDimension = 4096;

/// Dense eigenvalues only. Matrices that are Hermitian to round-off go
/// through the self-adjoint solver (real-symmetric when the imaginary part
/// vanishes), everything else through the general complex solver.
Spectrum eigen_spectrum(const HamiltonianMatrix& h, Index max_dim = kDefaultMaxDimension);

/// Sum_n eps_n^moment exp(-i eps_n t) (real time) or
/// Sum_n eps_n^moment exp(-eps_n tau) (Euclidean). moment in {0, 1, 2}.
Complex icf(const Spectrum& spec, double t, TimeKind kind, int moment = 0);

/// Same sum, averaged over the window [t - width/2, t + width/2]. The time
/// average of exp(-i eps t) is taken analytically (a sinc factor).
Complex icf_window_average(const Spectrum& spec, double t, double width);

enum class Pairing { interacting, free, difference };

struct CorrelatorSeries {
  TimeKind kind = TimeKind::euclidean;
  Pairing pairing = Pairing::difference;
  int moment = 0;
  std::vector<double> grid;
  std::vector<Complex> values;
};

/// Delta C on a strictly increasing time grid.
CorrelatorSeries difference_series(const Spectrum& interacting, const Spectrum& free,
                                   const std::vector<double>& grid, TimeKind kind,
                                   int moment = 0);

/// Tr[1 / (E - H)] = Sum_n 1 / (E - eps_n). Throws NumericalError within
/// 1e-12 of an eigenvalue.
Complex resolvent_trace(const Spectrum& spec, Complex E);

/// cot(phi) = -Im(dC) / Re(dC). Returns +/-infinity when |Re dC| < 1e-300.
double phase_cot_from_resolvent(Complex dC);

/// phi = atan(1 / cot phi), in (-pi/2, pi/2].
double phase_angle_from_resolvent(Complex dC);

enum class Prescription { e_plus_ieps, iL };

/// How the trace difference is evaluated. `finite_rank` diagonalizes only the
/// Hermitian free matrix and folds in H - H0 through its support; it needs
/// that support to hold at most kMaxFiniteRank sites. `automatic` picks it
/// for non-Hermitian interacting matrices, where a full eigensolve is slow.
enum class TraceMethod { automatic, eigenvalues, finite_rank };

inline constexpr Index kMaxFiniteRank = 16;

struct PrescriptionSpec {
  Prescription kind = Prescription::iL;
  double eps = 0.0;  ///< used by e_plus_ieps only
  Basis basis = Basis::coordinate;  ///< e_plus_ieps may also use momentum
  TraceMethod method = TraceMethod::automatic;
};

/// One energy of a resolvent scan.
///
/// For e_plus_ieps, z = E + i eps and the phase is read off z * dC, the
/// quantity whose infinite-volume limit -z dlnT/dz depends on k only
/// through k / (m V0). For iL, z = E and the phase is read off dC.
struct ScanRow {
  double E = 0;
  Complex z;
  Complex dC;          ///< Tr[1/(z - H) - 1/(z - H0)]
  Complex z_dC;        ///< z * dC
  Complex free_trace;  ///< Tr[1/(z - H0)]
  Complex krein;       ///< -z dlnT/dz (e_plus_ieps) or -dlnT/dE (iL)
  double cot_phi = 0;
  double cot_delta = 0;
  double rel_err = 0;  ///< |cot_phi - cot_delta| / |cot_delta|
};

struct ResolventScan {
  PrescriptionSpec prescription;
  LatticeConfig config;
  std::vector<ScanRow> rows;
  std::vector<std::string> warnings;

  std::vector<Complex> energies() const;
  std::vector<Complex> values() const;
};

/// Builds the interacting and free Hamiltonians for `cfg` under the given
/// prescription and evaluates Delta C-tilde on the grid using `prescription.method`.
ResolventScan scan_prescription(const LatticeConfig& cfg, const PrescriptionSpec& prescription,
                                const std::vector<double>& energies,
                                Index max_dim = kDefaultMaxDimension);

/// Indices of the rows or columns where h and h0 differ.
std::vector<Index> perturbation_support(const MatrixXc& h, const MatrixXc& h0);

/// Delta C-tilde from the free eigensystem and the low-rank difference.
ResolventScan scan_finite_rank(const LatticeConfig& cfg, const PrescriptionSpec& prescription,
                               const HamiltonianMatrix& interacting, const HamiltonianMatrix& free,
                               const std::vector<double>& energies,
                               Index max_dim = kDefaultMaxDimension);

/// Same evaluation from precomputed spectra.
ResolventScan scan_spectra(const LatticeConfig& cfg, const PrescriptionSpec& prescription,
                           const Spectrum& interacting, const Spectrum& free,
                           const std::vector<double>& energies);

}  // namespace icf
