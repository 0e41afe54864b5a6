#include <doctest.h>

#include <numbers>

#include "icf/spectral.hpp"
#include "oracles.hpp"

using namespace icf;

namespace {

Spectrum spectrum_of(const LatticeConfig& cfg, bool interacting, Basis basis = Basis::coordinate) {
  return eigen_spectrum(basis == Basis::momentum ? build_momentum_hamiltonian(cfg, interacting)
                                                 : build_coordinate_hamiltonian(cfg, interacting));
}

}  // namespace

TEST_CASE("eigen_spectrum") {
  const LatticeConfig cfg{2, 4.0, 1.0, 2.0};
  const Spectrum s = spectrum_of(cfg, true);
  const double a = 4.0;
  REQUIRE(s.size() == 2);
  CHECK(s.hermitian);
  CHECK(std::abs(s.eigenvalues(0) - 2.0 / (2 * a)) < 1e-15);
  CHECK(std::abs(s.eigenvalues(1) - (2.0 / (a * a) + 2.0 / (2 * a))) < 1e-15);

  const LatticeConfig big{16, 5.0, 1.0, 1.0};
  const HamiltonianMatrix hm = build_momentum_hamiltonian(big, false);
  const Spectrum sm = eigen_spectrum(hm);
  VectorXr diag = hm.entries.diagonal().real();
  std::sort(diag.data(), diag.data() + diag.size());
  CHECK((sm.eigenvalues.real() - diag).cwiseAbs().maxCoeff() < 1e-14);

  const Spectrum rot = eigen_spectrum(build_iL_rotated_hamiltonian(big, false));
  const Spectrum fr = spectrum_of(big, false);
  for (Index i = 0; i < 16; ++i) CHECK(std::abs(rot.eigenvalues(i) + fr.eigenvalues(15 - i)) < 1e-12);

  const Spectrum nh = eigen_spectrum(build_iL_rotated_hamiltonian(big, true));
  CHECK_FALSE(nh.hermitian);
  CHECK(nh.eigenvalues.imag().cwiseAbs().maxCoeff() > 1e-3);
  CHECK_THROWS_AS(eigen_spectrum(build_coordinate_hamiltonian({64, 1, 1, 1}, true), 32), ConfigError);
}

TEST_CASE("hermitian spectra are real") {
  const Spectrum s = spectrum_of({64, 10, 1, -3}, true);
  const double radius = s.eigenvalues.cwiseAbs().maxCoeff();
  CHECK(s.eigenvalues.imag().cwiseAbs().maxCoeff() <= 1e-10 * radius);
  for (Index i = 1; i < s.size(); ++i) CHECK(s.eigenvalues(i - 1).real() <= s.eigenvalues(i).real());
}

TEST_CASE("ICF trace identities") {
  const LatticeConfig cfg{24, 6.0, 1.0, 1.5};
  const MatrixXc h = build_coordinate_hamiltonian(cfg, true).entries;
  const Spectrum s = eigen_spectrum({h, Basis::coordinate, Rotation::none, true});
  CHECK(icf::icf(s, 0, TimeKind::real) == Complex(24.0));
  CHECK(std::abs(icf::icf(s, 0, TimeKind::real, 1) - h.trace()) < 1e-8 * std::abs(h.trace()));
  const Complex tr2 = (h * h).trace();
  CHECK(std::abs(icf::icf(s, 0, TimeKind::real, 2) - tr2) < 1e-8 * std::abs(tr2));
  CHECK(std::abs(icf::icf(s, 0, TimeKind::euclidean, 2) - tr2) < 1e-8 * std::abs(tr2));
  CHECK_THROWS_AS(icf::icf(s, -1, TimeKind::euclidean), ConfigError);
  CHECK_THROWS_AS(icf::icf(s, 1, TimeKind::real, 3), ConfigError);
  const Spectrum deep = spectrum_of({8, 1, 1, -200}, true);
  CHECK_THROWS_AS(icf::icf(deep, 100, TimeKind::euclidean), NumericalError);
}

TEST_CASE("Euclidean difference series") {
  const LatticeConfig cfg{400, 10.0, 1.0, 2.0};
  const Spectrum si = spectrum_of(cfg, true), s0 = spectrum_of(cfg, false);
  const auto series = difference_series(si, s0, {0.0, 2.0}, TimeKind::euclidean);
  CHECK(series.values[0] == Complex(0.0));
  const Complex lim = icf_infinite_limit(2.0, TimeKind::euclidean, {1, 2});
  CHECK(std::abs(series.values[1] - lim) <= 0.02);
  CHECK_THROWS_AS(difference_series(si, s0, {1.0, 1.0}, TimeKind::euclidean), ConfigError);
  CHECK_THROWS_AS(difference_series(si, s0, {2.0, 1.0}, TimeKind::euclidean), ConfigError);
}

TEST_CASE("first moment is minus the tau derivative") {
  const LatticeConfig cfg{200, 10.0, 1.0, 2.0};
  const Spectrum si = spectrum_of(cfg, true), s0 = spectrum_of(cfg, false);
  const double h = 1e-4;
  for (double tau = 1.0; tau <= 3.0; tau += 0.25) {
    const auto m1 = difference_series(si, s0, {tau}, TimeKind::euclidean, 1).values[0];
    const auto up = difference_series(si, s0, {tau + h}, TimeKind::euclidean).values[0];
    const auto dn = difference_series(si, s0, {tau - h}, TimeKind::euclidean).values[0];
    const Complex deriv = -(up - dn) / (2 * h);
    CHECK(std::abs(m1 - deriv) <= 1e-4 * std::abs(m1));
  }
}

TEST_CASE("window average of a single level") {
  Spectrum s;
  s.eigenvalues = VectorXc::Constant(1, 0.8);
  const double w = 1.3, t = 0.4;
  const Complex q = oracle::integrate([&](double u) { return std::exp(Complex(0, -0.8 * u)); },
                                      t - w / 2, t + w / 2, 200) / w;
  CHECK(std::abs(icf_window_average(s, t, w) - q) < 1e-13);
  CHECK(std::abs(icf_window_average(s, t, 1e-9) - icf::icf(s, t, TimeKind::real)) < 1e-12);
}

TEST_CASE("resolvent trace") {
  Spectrum one;
  one.eigenvalues = VectorXc::Constant(1, 0.7);
  CHECK(std::abs(resolvent_trace(one, 1.7) - 1.0) < 1e-15);
  CHECK_THROWS_AS(resolvent_trace(one, 0.7 + 1e-13), NumericalError);

  const Spectrum s = spectrum_of({32, 8, 1, 1}, true);
  const Complex z(0.37, 0.2);
  CHECK(std::abs(resolvent_trace(s, std::conj(z)) - std::conj(resolvent_trace(s, z))) < 1e-13);
}

TEST_CASE("truncated free momentum trace approaches the box form") {
  const double L = 10, m = 1;
  const Complex z(0.3, 0.1);
  const Complex exact = free_resolvent(z, L, ResolventMode::box, m);
  double previous = 1e300;
  for (Index n : {32, 128, 512}) {
    const LatticeConfig cfg{n, L, m, 0.0};
    const Complex v = resolvent_trace(spectrum_of(cfg, false, Basis::momentum), z) / L;
    const double err = std::abs(v - exact);
    double tail = 0;
    for (Index k = n / 2; k < 4000000; ++k) tail += 2 * m * L * L / std::pow(2 * std::numbers::pi * k, 2);
    CHECK(err < previous);
    CHECK(err < 2 * tail / L);
    previous = err;
  }
}

TEST_CASE("phase from the resolvent") {
  CHECK(std::isinf(phase_cot_from_resolvent(Complex(0, -2))));
  CHECK(phase_cot_from_resolvent(Complex(0, -2)) > 0);
  for (double d : {-2.0, 0.5, 3.0}) {
    const Complex dc = (std::tan(0.3) - Complex(0, 1)) * d;
    CHECK(phase_cot_from_resolvent(dc) == doctest::Approx(1 / std::tan(0.3)).epsilon(1e-14));
  }
  CHECK(phase_angle_from_resolvent((std::tan(0.3) - Complex(0, 1)) * 2.0) == doctest::Approx(0.3));
}

TEST_CASE("scans") {
  const std::vector<double> grid = linspace(0.1, 2, 7);
  const LatticeConfig zero{64, 20, 1, 0};
  for (auto kind : {Prescription::e_plus_ieps, Prescription::iL}) {
    const ResolventScan s = scan_prescription(zero, {kind, 0.1, Basis::coordinate}, grid);
    for (const auto& r : s.rows) CHECK(r.dC == Complex(0.0));
  }

  const LatticeConfig cfg{128, 20, 1, 2};
  for (auto kind : {Prescription::e_plus_ieps, Prescription::iL}) {
    PrescriptionSpec a{kind, 0.1, Basis::coordinate, TraceMethod::eigenvalues};
    PrescriptionSpec b = a;
    b.method = TraceMethod::finite_rank;
    const ResolventScan sa = scan_prescription(cfg, a, grid), sb = scan_prescription(cfg, b, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(std::abs(sa.rows[i].dC - sb.rows[i].dC) < 1e-10 * std::abs(sa.rows[i].dC));
      CHECK(std::abs(sa.rows[i].free_trace - sb.rows[i].free_trace) < 1e-9 * std::abs(sa.rows[i].free_trace));
    }
    if (kind == Prescription::e_plus_ieps) {
      CHECK(sa.rows[0].z == Complex(0.1, 0.1));
      CHECK(sa.warnings.empty() == (std::sqrt(0.1) * 20 >= 5));
    } else {
      CHECK(sa.rows[0].z == Complex(0.1, 0.0));
    }
  }
  CHECK_THROWS_AS(scan_prescription(cfg, {Prescription::e_plus_ieps, 0.0, Basis::coordinate}, grid), ConfigError);
  CHECK_THROWS_AS(scan_prescription(cfg, {Prescription::iL, 0.0, Basis::momentum}, grid), ConfigError);
  CHECK_FALSE(scan_prescription({16, 4, 1, 1}, {Prescription::e_plus_ieps, 0.1}, grid).warnings.empty());
}

TEST_CASE("E+i eps free column per length matches the box form") {
  // The momentum builder truncates |n| <= N/2; the omitted modes are added
  // back by direct summation.
  const double L = 100, m = 1, eps = 0.1;
  const Index n = 2000;
  const Complex z(0.5, eps);
  const ResolventScan s =
      scan_prescription({n, L, m, 2.0}, {Prescription::e_plus_ieps, eps, Basis::momentum}, {0.5});
  const double dk = 2 * std::numbers::pi / L;
  Complex tail = 0.0;
  const Index cutoff = 20000000;
  for (Index k = n / 2; k < cutoff; ++k) {
    tail += 1.0 / (z - std::pow(dk * k, 2) / (2 * m));
    tail += 1.0 / (z - std::pow(dk * (k + 1), 2) / (2 * m));
  }
  tail -= 2 * 2 * m / (dk * dk * static_cast<double>(cutoff));
  const Complex total = (s.rows[0].free_trace + tail) / L;
  CHECK(std::abs(total - free_resolvent(z, L, ResolventMode::box, m)) < 1e-6);
}

TEST_CASE("finite-rank support") {
  const LatticeConfig cfg{16, 4, 1, 1};
  const auto h = build_coordinate_hamiltonian(cfg, true).entries;
  const auto h0 = build_coordinate_hamiltonian(cfg, false).entries;
  CHECK(perturbation_support(h, h0) == std::vector<Index>{7, 8});
  const auto hm = build_momentum_hamiltonian(cfg, true).entries;
  const auto hm0 = build_momentum_hamiltonian(cfg, false).entries;
  CHECK(perturbation_support(hm, hm0).size() == 16);
}

TEST_CASE("windowed real-time ICF tracks the limit" * doctest::test_suite("gap")) {
  const LatticeConfig cfg{300, 10.0, 1.0, 2.0};
  const Spectrum si = spectrum_of(cfg, true), s0 = spectrum_of(cfg, false);
  const double e1 = std::pow(2 * std::numbers::pi / cfg.L, 2) / (2 * cfg.m);
  const double w = 2 * std::numbers::pi / e1;
  for (double t = 1.0; t <= 5.0; t += 0.5) {
    const Complex avg = icf_window_average(si, t, w) - icf_window_average(s0, t, w);
    const Complex lim = icf_infinite_limit(t, TimeKind::real, {cfg.m, cfg.V0});
    CHECK(std::abs(avg - lim) <= 0.05);
  }
}
