#include "icf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace icf {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kMaxExponent = 700.0;
constexpr double kPoleTolerance = 1e-12;

void sort_by_real(VectorXc& v) {
  std::sort(v.data(), v.data() + v.size(), [](const Complex& a, const Complex& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
}

Complex power(Complex e, int moment) {
  switch (moment) {
    case 0: return 1.0;
    case 1: return e;
    default: return e * e;
  }
}

void check_moment(int moment) {
  if (moment < 0 || moment > 2) {
    throw ConfigError("icf: moment must be 0, 1 or 2, got " + std::to_string(moment));
  }
}

Complex sinc(Complex x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

}  // namespace

Spectrum eigen_spectrum(const HamiltonianMatrix& h, Index max_dim) {
  const MatrixXc& m = h.entries;
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ConfigError("eigen_spectrum: matrix must be square and non-empty (" + h.describe() + ")");
  }
  if (m.rows() > max_dim) {
    throw ConfigError("eigen_spectrum: dimension " + std::to_string(m.rows()) +
                      " exceeds the cap " + std::to_string(max_dim));
  }
  if (!m.allFinite()) throw ConfigError("eigen_spectrum: non-finite entries (" + h.describe() + ")");

  Spectrum s;
  s.source = h.describe();
  const double scale = std::max(max_abs(m), 1.0);
  s.hermitian = hermiticity_defect(m) <= 1e-14 * scale;

  if (s.hermitian) {
    const bool real = max_abs(m.imag()) == 0.0;
    VectorXr ev;
    Eigen::ComputationInfo info;
    if (real) {
      Eigen::SelfAdjointEigenSolver<MatrixXr> es(m.real(), Eigen::EigenvaluesOnly);
      info = es.info();
      ev = es.eigenvalues();
    } else {
      Eigen::SelfAdjointEigenSolver<MatrixXc> es(m, Eigen::EigenvaluesOnly);
      info = es.info();
      ev = es.eigenvalues();
    }
    if (info != Eigen::Success) throw NumericalError("eigen_spectrum: no convergence for " + s.source);
    s.eigenvalues = ev.cast<Complex>();
  } else {
    Eigen::ComplexEigenSolver<MatrixXc> es(m, false);
    if (es.info() != Eigen::Success) {
      throw NumericalError("eigen_spectrum: no convergence for " + s.source);
    }
    s.eigenvalues = es.eigenvalues();
  }
  sort_by_real(s.eigenvalues);
  return s;
}

Complex icf(const Spectrum& spec, double t, TimeKind kind, int moment) {
  check_moment(moment);
  if (!std::isfinite(t)) throw ConfigError("icf: non-finite time");
  if (kind == TimeKind::euclidean && t < 0) throw ConfigError("icf: Euclidean time must be >= 0");
  Complex sum = 0.0;
  for (const Complex& e : spec.eigenvalues) {
    const Complex exponent = kind == TimeKind::euclidean ? -e * t : -kI * e * t;
    if (exponent.real() > kMaxExponent) {
      std::ostringstream os;
      os << "icf: exponent " << exponent.real() << " exceeds " << kMaxExponent
         << " at t = " << t << " (eigenvalue " << e << ")";
      throw NumericalError(os.str());
    }
    sum += power(e, moment) * std::exp(exponent);
  }
  return sum;
}

Complex icf_window_average(const Spectrum& spec, double t, double width) {
  if (!(width > 0) || !std::isfinite(width)) throw ConfigError("icf_window_average: width must be > 0");
  Complex sum = 0.0;
  for (const Complex& e : spec.eigenvalues) {
    sum += std::exp(-kI * e * t) * sinc(e * (width / 2));
  }
  return sum;
}

CorrelatorSeries difference_series(const Spectrum& interacting, const Spectrum& free,
                                   const std::vector<double>& grid, TimeKind kind, int moment) {
  if (interacting.size() != free.size()) {
    throw ConfigError("difference_series: spectra have different dimensions");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("difference_series: grid must be strictly increasing");
  }
  CorrelatorSeries out;
  out.kind = kind;
  out.moment = moment;
  out.grid = grid;
  out.values.reserve(grid.size());
  for (double t : grid) {
    // Equal dimensions make the zeroth moment vanish identically at t = 0.
    if (t == 0 && moment == 0) {
      out.values.emplace_back(0.0);
      continue;
    }
    out.values.push_back(icf(interacting, t, kind, moment) - icf(free, t, kind, moment));
  }
  return out;
}

Complex resolvent_trace(const Spectrum& spec, Complex E) {
  Complex sum = 0.0;
  for (const Complex& e : spec.eigenvalues) {
    const Complex d = E - e;
    if (std::abs(d) < kPoleTolerance) {
      std::ostringstream os;
      os << "resolvent_trace: E = " << E << " within " << kPoleTolerance << " of eigenvalue " << e;
      throw NumericalError(os.str());
    }
    sum += 1.0 / d;
  }
  return sum;
}

double phase_cot_from_resolvent(Complex dC) {
  if (std::abs(dC.real()) < 1e-300) {
    const double inf = std::numeric_limits<double>::infinity();
    return dC.imag() <= 0 ? inf : -inf;
  }
  return -dC.imag() / dC.real();
}

double phase_angle_from_resolvent(Complex dC) {
  const double c = phase_cot_from_resolvent(dC);
  if (std::isinf(c)) return std::acos(0.0);
  return std::atan(1.0 / c);
}

std::vector<Complex> ResolventScan::energies() const {
  std::vector<Complex> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.z);
  return out;
}

std::vector<Complex> ResolventScan::values() const {
  std::vector<Complex> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.dC);
  return out;
}

namespace {

void validate_prescription(const LatticeConfig& cfg, const PrescriptionSpec& p) {
  cfg.validate();
  if (p.kind == Prescription::e_plus_ieps) {
    if (!(p.eps > 0) || !std::isfinite(p.eps)) throw ConfigError("e_plus_ieps: eps must be > 0");
    if (p.basis == Basis::field) throw ConfigError("e_plus_ieps: basis must be coordinate or momentum");
  } else if (p.basis != Basis::coordinate) {
    throw ConfigError("iL prescription: only the coordinate basis has a rotated form");
  }
}

}  // namespace

namespace {

ResolventScan begin_scan(const LatticeConfig& cfg, const PrescriptionSpec& prescription) {
  validate_prescription(cfg, prescription);
  ResolventScan scan;
  scan.prescription = prescription;
  scan.config = cfg;
  if (prescription.kind == Prescription::e_plus_ieps && std::sqrt(prescription.eps) * cfg.L < 5) {
    std::ostringstream os;
    os << "sqrt(eps) * L = " << std::sqrt(prescription.eps) * cfg.L
       << " < 5; finite-volume poles are not smeared";
    scan.warnings.push_back(os.str());
  }
  return scan;
}

Complex scan_point(const PrescriptionSpec& prescription, double E) {
  if (!(E > 0) || !std::isfinite(E)) throw ConfigError("scan: energies must be positive");
  return prescription.kind == Prescription::e_plus_ieps ? Complex(E, prescription.eps) : Complex(E, 0.0);
}

ScanRow make_row(const ResolventScan& scan, double E, Complex z, Complex dC, Complex free_trace) {
  const bool eps_mode = scan.prescription.kind == Prescription::e_plus_ieps;
  const ScatteringParams sp{scan.config.m, scan.config.V0};
  ScanRow r;
  r.E = E;
  r.z = z;
  r.free_trace = free_trace;
  r.dC = dC;
  r.z_dC = z * dC;
  if (sp.V0 != 0) {
    const Amplitudes a = amplitudes(z, sp);
    r.krein = eps_mode ? -z * a.dlnT_dE : -a.dlnT_dE;
    r.cot_delta = phase_shift_cot(E, sp);
  } else {
    r.krein = 0.0;
    r.cot_delta = std::numeric_limits<double>::infinity();
  }
  r.cot_phi = phase_cot_from_resolvent(eps_mode ? r.z_dC : r.dC);
  r.rel_err = std::isfinite(r.cot_delta) && r.cot_delta != 0
                  ? std::abs(r.cot_phi - r.cot_delta) / std::abs(r.cot_delta)
                  : std::numeric_limits<double>::quiet_NaN();
  return r;
}

HamiltonianMatrix build_for(const LatticeConfig& cfg, const PrescriptionSpec& p, bool interacting) {
  if (p.kind == Prescription::iL) return build_iL_rotated_hamiltonian(cfg, interacting);
  if (p.basis == Basis::momentum) return build_momentum_hamiltonian(cfg, interacting);
  return build_coordinate_hamiltonian(cfg, interacting);
}

}  // namespace

ResolventScan scan_spectra(const LatticeConfig& cfg, const PrescriptionSpec& prescription,
                           const Spectrum& interacting, const Spectrum& free,
                           const std::vector<double>& energies) {
  ResolventScan scan = begin_scan(cfg, prescription);
  scan.rows.reserve(energies.size());
  for (double E : energies) {
    const Complex z = scan_point(prescription, E);
    const Complex f = resolvent_trace(free, z);
    scan.rows.push_back(make_row(scan, E, z, resolvent_trace(interacting, z) - f, f));
  }
  return scan;
}

std::vector<Index> perturbation_support(const MatrixXc& h, const MatrixXc& h0) {
  if (h.rows() != h0.rows() || h.cols() != h0.cols()) {
    throw ConfigError("perturbation_support: shapes differ");
  }
  const MatrixXc d = h - h0;
  std::vector<Index> s;
  for (Index i = 0; i < d.rows(); ++i) {
    if (d.row(i).cwiseAbs().maxCoeff() > 0 || d.col(i).cwiseAbs().maxCoeff() > 0) s.push_back(i);
  }
  return s;
}

ResolventScan scan_finite_rank(const LatticeConfig& cfg, const PrescriptionSpec& prescription,
                               const HamiltonianMatrix& interacting, const HamiltonianMatrix& free,
                               const std::vector<double>& energies, Index max_dim) {
  ResolventScan scan = begin_scan(cfg, prescription);
  const Index n = free.dim();
  if (n > max_dim) {
    throw ConfigError("scan: dimension " + std::to_string(n) + " exceeds the cap " + std::to_string(max_dim));
  }
  const double scale = std::max(max_abs(free.entries), 1.0);
  if (hermiticity_defect(free.entries) > 1e-14 * scale) {
    throw ConfigError("scan_finite_rank: the unperturbed matrix must be Hermitian");
  }
  const std::vector<Index> support = perturbation_support(interacting.entries, free.entries);
  const Index r = static_cast<Index>(support.size());
  if (r > kMaxFiniteRank) throw ConfigError("scan_finite_rank: perturbation support too large");

  VectorXr lambda;
  MatrixXc vectors;
  if (free.entries.imag().cwiseAbs().maxCoeff() == 0) {
    Eigen::SelfAdjointEigenSolver<MatrixXr> es(free.entries.real());
    if (es.info() != Eigen::Success) throw NumericalError("scan_finite_rank: eigensolver did not converge");
    lambda = es.eigenvalues();
    vectors = es.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(free.entries);
    if (es.info() != Eigen::Success) throw NumericalError("scan_finite_rank: eigensolver did not converge");
    lambda = es.eigenvalues();
    vectors = es.eigenvectors();
  }
  MatrixXc us(r, n);
  MatrixXc dS(r, r);
  for (Index a = 0; a < r; ++a) {
    us.row(a) = vectors.row(support[a]);
    for (Index b = 0; b < r; ++b) {
      dS(a, b) = interacting.entries(support[a], support[b]) - free.entries(support[a], support[b]);
    }
  }

  scan.rows.reserve(energies.size());
  for (double E : energies) {
    const Complex z = scan_point(prescription, E);
    VectorXc g1(n);
    Complex f = 0.0;
    for (Index k = 0; k < n; ++k) {
      const Complex d = z - lambda(k);
      if (std::abs(d) < kPoleTolerance) {
        throw NumericalError("scan_finite_rank: energy on a free eigenvalue");
      }
      g1(k) = 1.0 / d;
      f += g1(k);
    }
    Complex dC = 0.0;
    if (r > 0) {
      // Tr[1/(z-H)] - Tr[1/(z-H0)] = d/dz ln det(1 - G0 D) = Tr[(1 - g D)^-1 g2 D]
      const MatrixXc g = us * g1.asDiagonal() * us.adjoint();
      const MatrixXc g2 = us * g1.array().square().matrix().asDiagonal() * us.adjoint();
      const MatrixXc a = MatrixXc::Identity(r, r) - g * dS;
      Eigen::FullPivLU<MatrixXc> lu(a);
      if (lu.rcond() < 1e-14) throw NumericalError("scan_finite_rank: energy on an interacting eigenvalue");
      dC = lu.solve(g2 * dS).trace();
    }
    scan.rows.push_back(make_row(scan, E, z, dC, f));
  }
  return scan;
}

ResolventScan scan_prescription(const LatticeConfig& cfg, const PrescriptionSpec& prescription,
                                const std::vector<double>& energies, Index max_dim) {
  validate_prescription(cfg, prescription);
  const HamiltonianMatrix h0 = build_for(cfg, prescription, false);
  const HamiltonianMatrix h = build_for(cfg, prescription, true);
  TraceMethod method = prescription.method;
  if (method == TraceMethod::automatic) {
    const double scale = std::max(max_abs(h.entries), 1.0);
    const bool hermitian = hermiticity_defect(h.entries) <= 1e-14 * scale;
    const bool small = perturbation_support(h.entries, h0.entries).size() <= static_cast<std::size_t>(kMaxFiniteRank);
    method = !hermitian && small ? TraceMethod::finite_rank : TraceMethod::eigenvalues;
  }
  if (method == TraceMethod::finite_rank) return scan_finite_rank(cfg, prescription, h, h0, energies, max_dim);
  auto pending = std::async(std::launch::async, [&] { return eigen_spectrum(h0, max_dim); });
  const Spectrum interacting = eigen_spectrum(h, max_dim);
  const Spectrum free = pending.get();
  return scan_spectra(cfg, prescription, interacting, free, energies);
}

}  // namespace icf
