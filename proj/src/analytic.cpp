#include "icf/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace icf {

namespace {

constexpr Complex kI{0.0, 1.0};

// Poppe & Wijers, ACM TOMS 16 (1990), Algorithm 680. Region boundaries and
// truncation orders are the published ones.
Complex wofz(double xi, double yi) {
  constexpr double factor = 2 * std::numbers::inv_sqrtpi;
  const double xabs = std::abs(xi);
  const double yabs = std::abs(yi);
  const double x = xabs / 6.3;
  const double y = yabs / 4.4;

  double qrho = x * x + y * y;
  double xquad = xabs * xabs - yabs * yabs;
  const double yquad = 2 * xabs * yabs;
  const bool series = qrho < 0.085264;

  double u = 0, v = 0, u2 = 0, v2 = 0;
  if (series) {
    qrho = (1 - 0.85 * y) * std::sqrt(qrho);
    const int n = static_cast<int>(std::lround(6 + 72 * qrho));
    int j = 2 * n + 1;
    double xsum = 1.0 / j;
    double ysum = 0.0;
    for (int i = n; i >= 1; --i) {
      j -= 2;
      const double xaux = (xsum * xquad - ysum * yquad) / i;
      ysum = (xsum * yquad + ysum * xquad) / i;
      xsum = xaux + 1.0 / j;
    }
    const double u1 = -factor * (xsum * yabs + ysum * xabs) + 1.0;
    const double v1 = factor * (xsum * xabs - ysum * yabs);
    const double daux = std::exp(-xquad);
    u2 = daux * std::cos(yquad);
    v2 = -daux * std::sin(yquad);
    u = u1 * u2 - v1 * v2;
    v = u1 * v2 + v1 * u2;
  } else {
    double h = 0, h2 = 0;
    int kapn = 0;
    int nu = 0;
    if (qrho > 1.0) {
      qrho = std::sqrt(qrho);
      nu = static_cast<int>(3 + (1442 / (26 * qrho + 77)));
    } else {
      qrho = (1 - y) * std::sqrt(1 - qrho);
      h = 1.88 * qrho;
      h2 = 2 * h;
      kapn = static_cast<int>(std::lround(7 + 34 * qrho));
      nu = static_cast<int>(std::lround(16 + 26 * qrho));
    }
    const bool accelerate = h > 0;
    double qlambda = accelerate ? std::pow(h2, kapn) : 0.0;
    double rx = 0, ry = 0, sx = 0, sy = 0;
    for (int n = nu; n >= 0; --n) {
      const double np1 = n + 1;
      double tx = yabs + h + np1 * rx;
      double ty = xabs - np1 * ry;
      const double c = 0.5 / (tx * tx + ty * ty);
      rx = c * tx;
      ry = c * ty;
      if (accelerate && n <= kapn) {
        tx = qlambda + sx;
        sx = rx * tx - ry * sy;
        sy = ry * tx + rx * sy;
        qlambda /= h2;
      }
    }
    if (accelerate) {
      u = factor * sx;
      v = factor * sy;
    } else {
      u = factor * rx;
      v = factor * ry;
    }
    if (yabs == 0.0) u = std::exp(-xabs * xabs);
  }

  if (yi < 0) {
    if (series) {
      u2 *= 2;
      v2 *= 2;
    } else {
      xquad = -xquad;
      const double w1 = 2 * std::exp(xquad);
      u2 = w1 * std::cos(yquad);
      v2 = -w1 * std::sin(yquad);
    }
    u = u2 - u;
    v = v2 - v;
    if (xi > 0) v = -v;
  } else if (xi < 0) {
    v = -v;
  }
  return {u, v};
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// cot(w) = i (e^{2iw} + 1) / (e^{2iw} - 1), evaluated where |e^{2iw}| <= 1.
Complex stable_cot(Complex w) {
  if (w.imag() < 0) return std::conj(stable_cot(std::conj(w)));
  const Complex e = std::exp(2.0 * kI * w);
  return kI * (e + 1.0) / (e - 1.0);
}

Complex stable_coth(Complex w) {
  if (w.real() < 0) return -stable_coth(-w);
  const Complex e = std::exp(-2.0 * w);
  return (1.0 + e) / (1.0 - e);
}

}  // namespace

Complex faddeeva_w(Complex z) {
  if (!finite(z)) throw NumericalError("faddeeva_w: non-finite argument");
  return wofz(z.real(), z.imag());
}

Complex erfcx(Complex z) { return faddeeva_w(kI * z); }

Complex complex_erfc(Complex z) {
  if (!finite(z)) throw NumericalError("complex_erfc: non-finite argument");
  if (z == Complex{0.0, 0.0}) return 1.0;
  if (z.real() >= 0) return std::exp(-z * z) * faddeeva_w(kI * z);
  return 2.0 - std::exp(-z * z) * faddeeva_w(-kI * z);
}

void ScatteringParams::validate() const {
  if (!(m > 0) || !std::isfinite(m)) throw ConfigError("scattering: m must be positive");
  if (V0 == 0 || !std::isfinite(V0)) throw ConfigError("scattering: V0 must be nonzero and finite");
}

double phase_shift_cot(double E, const ScatteringParams& p) {
  p.validate();
  if (!(E > 0)) throw ConfigError("phase_shift_cot: energy must be positive");
  return -std::sqrt(2 * p.m * E) / (p.m * p.V0);
}

double phase_shift(double E, const ScatteringParams& p) {
  const double c = phase_shift_cot(E, p);
  return std::atan(1.0 / c);
}

Amplitudes amplitudes(Complex E, const ScatteringParams& p) {
  p.validate();
  if (E == Complex{0.0, 0.0}) throw ConfigError("amplitudes: E = 0 is a branch point");
  if (E.imag() == 0 && E.real() < 0) {
    throw ConfigError("amplitudes: negative real energy lies on the cut");
  }
  const Complex k = std::sqrt(2.0 * p.m * E);
  const Complex g = kI * (p.m * p.V0);
  Amplitudes a;
  a.f = -(p.m * p.V0) / (k + g);
  a.T = k / (k + g);
  // ln T = ln k - ln(k + i m V0), dk/dE = m / k
  a.dlnT_dE = (p.m / k) * (1.0 / k - 1.0 / (k + g));
  return a;
}

std::optional<double> bound_state_energy(const ScatteringParams& p) {
  if (p.V0 >= 0) return std::nullopt;
  return -0.5 * p.m * p.V0 * p.V0;
}

Complex icf_infinite_limit(double t, TimeKind kind, const ScatteringParams& p) {
  p.validate();
  if (!std::isfinite(t)) throw ConfigError("icf_infinite_limit: non-finite time");
  if (kind == TimeKind::euclidean && t < 0) {
    throw ConfigError("icf_infinite_limit: Euclidean time must be >= 0");
  }
  if (t == 0) return 0.0;
  const double g = p.m * p.V0;
  // x = g sqrt(i t / 2m); erfc(x) exp(x^2) = erfcx(x).
  Complex x;
  if (kind == TimeKind::euclidean) {
    x = g * std::sqrt(t / (2 * p.m));
    return Complex(0.5 * erfcx(x).real() - 0.5, 0.0);
  }
  x = g * std::sqrt(kI * t / (2 * p.m));
  return 0.5 * erfcx(x) - 0.5;
}

Complex free_resolvent(Complex E, double L, ResolventMode mode, double m) {
  if (!(L > 0) || !(m > 0)) throw ConfigError("free_resolvent: L and m must be positive");
  if (!finite(E)) throw ConfigError("free_resolvent: non-finite energy");
  if (mode != ResolventMode::box && !(E.real() > 0)) {
    throw ConfigError("free_resolvent: infinite and iL modes need Re E > 0");
  }
  if (mode == ResolventMode::box) {
    const double kr = std::sqrt(2 * m * std::max(E.real(), 0.0));
    const double n0 = std::round(kr * L / (2 * std::numbers::pi));
    for (double n = std::max(0.0, n0 - 1); n <= n0 + 1; n += 1) {
      const double level = std::pow(2 * std::numbers::pi * n / L, 2) / (2 * m);
      if (std::abs(E - level) < 1e-12) {
        throw NumericalError("free_resolvent: energy within 1e-12 of free level " +
                             std::to_string(level));
      }
    }
  }
  const Complex k = std::sqrt(2.0 * m * E);
  const Complex w = k * L / 2.0;
  switch (mode) {
    case ResolventMode::box: return m * stable_cot(w) / k;
    case ResolventMode::infinite: return -kI * m / k;
    case ResolventMode::iL: return -kI * m * stable_coth(w) / k;
  }
  return 0.0;
}

}  // namespace icf
