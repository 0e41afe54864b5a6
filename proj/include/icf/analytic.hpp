#pragma once

#include <optional>

#include "icf/dense.hpp"

namespace icf {

// ---------------------------------------------------------------------------
// Complex error functions
// ---------------------------------------------------------------------------

/// Faddeeva function w(z) = exp(-z^2) erfc(-i z), full complex plane.
///
/// Power series near the origin, truncated Laplace continued fraction (with
/// the Gautschi convergence acceleration) elsewhere. Roughly 14 significant
/// digits where the result is representable.
Complex faddeeva_w(Complex z);

/// Scaled complementary error function exp(z^2) erfc(z) = w(i z).
Complex erfcx(Complex z);

/// erfc(z). Throws NumericalError for non-finite input.
Complex complex_erfc(Complex z);

// ---------------------------------------------------------------------------
// Contact-potential scattering in infinite volume
// ---------------------------------------------------------------------------

struct ScatteringParams {
  double m = 1.0;
  double V0 = 1.0;

  void validate() const;
};

/// cot(delta(E)) = -sqrt(2 m E) / (m V0). E > 0.
double phase_shift_cot(double E, const ScatteringParams& p);

/// delta(E) in (-pi/2, pi/2), i.e. atan(1 / cot delta). This is one branch
/// among many; comparisons should be made on cot delta.
double phase_shift(double E, const ScatteringParams& p);

struct Amplitudes {
  Complex f;        ///< scattering amplitude -m V0 / (k + i m V0)
  Complex T;        ///< transmission amplitude 1 + i f
  Complex dlnT_dE;  ///< d ln T / dE, closed form
};

/// Amplitudes at (possibly complex) energy, k = sqrt(2 m E) on the principal
/// branch. Rejects E = 0.
Amplitudes amplitudes(Complex E, const ScatteringParams& p);

/// -1/2 m V0^2 for attractive V0, empty otherwise.
std::optional<double> bound_state_energy(const ScatteringParams& p);

enum class TimeKind { real, euclidean };

/// Infinite-volume limit of C(t) - C0(t):
///   1/2 erfc(m V0 sqrt(i t / 2m)) exp((m V0)^2 i t / 2m) - 1/2.
/// For TimeKind::euclidean the argument is tau with i t = tau, and the
/// result is real. The bound-state term for V0 < 0 is included.
Complex icf_infinite_limit(double t, TimeKind kind, const ScatteringParams& p);

// ---------------------------------------------------------------------------
// Free resolvent per unit length, (1/L) Tr[1 / (E - H0)]
// ---------------------------------------------------------------------------

enum class ResolventMode { box, infinite, iL };

/// box:      m cot(k L / 2) / k
/// infinite: -i m / k
/// iL:       -i m coth(k L / 2) / k
/// with k = sqrt(2 m E). Box mode throws NumericalError within 1e-12 of a
/// free level (2 pi n / L)^2 / 2m.
Complex free_resolvent(Complex E, double L, ResolventMode mode, double m);

}  // namespace icf
