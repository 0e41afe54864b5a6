#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "icf/lattice.hpp"
#include "oracles.hpp"

using namespace icf;

namespace {

double max_diff(const MatrixXc& a, const MatrixXc& b) { return (a - b).cwiseAbs().maxCoeff(); }

VectorXr sorted_eigenvalues(const MatrixXc& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("coordinate hamiltonian, two sites") {
  const LatticeConfig cfg{2, 4.0, 1.0, 2.0};
  const double a = 4.0;
  const MatrixXc h = build_coordinate_hamiltonian(cfg, true).entries;
  const double c = 1.0 / (a * a) + 2.0 / (2 * a);
  MatrixXc expected(2, 2);
  expected << c, -1.0 / (a * a), -1.0 / (a * a), c;
  CHECK(max_diff(h, expected) < 1e-15);
}

TEST_CASE("coordinate hamiltonian, four sites against a stencil") {
  const LatticeConfig cfg{4, 4.0, 1.0, 2.0};
  const double a = 4.0 / 3.0;
  REQUIRE(cfg.spacing() == doctest::Approx(a).epsilon(1e-15));
  MatrixXr expected = oracle::stencil_kinetic(4, a, 1.0);
  expected(1, 1) += 2.0 / (2 * a);
  expected(2, 2) += 2.0 / (2 * a);
  const MatrixXc h = build_coordinate_hamiltonian(cfg, true).entries;
  CHECK(max_diff(h, expected.cast<Complex>()) < 1e-14);
  CHECK(h(0, 0).real() == doctest::Approx(1 / (a * a)));
  CHECK(h(1, 1).real() == doctest::Approx(1 / (a * a) + 2 / (2 * a)));
  CHECK(h(0, 3).real() == doctest::Approx(-1 / (2 * a * a)));
}

TEST_CASE("stencil agreement for larger rings") {
  for (Index n : {6, 16, 64}) {
    const LatticeConfig cfg{n, 7.0, 1.3, -0.8};
    MatrixXr expected = oracle::stencil_kinetic(n, cfg.spacing(), cfg.m);
    expected.diagonal() += contact_potential(cfg);
    CHECK(max_diff(build_coordinate_hamiltonian(cfg, true).entries, expected.cast<Complex>()) < 1e-12);
  }
}

TEST_CASE("contact potential integrates to V0") {
  for (auto p : {DeltaPlacement::split_pair, DeltaPlacement::single_site}) {
    const LatticeConfig cfg{32, 10.0, 1.0, 2.5, p};
    const VectorXr v = contact_potential(cfg);
    CHECK(v.sum() * cfg.spacing() == doctest::Approx(2.5).epsilon(1e-14));
    CHECK((v.array() != 0).count() == (p == DeltaPlacement::split_pair ? 2 : 1));
  }
}

TEST_CASE("free ring has a zero mode") {
  const LatticeConfig cfg{10, 3.0, 0.7, 5.0};
  const MatrixXc h = build_coordinate_hamiltonian(cfg, false).entries;
  const VectorXc ones = VectorXc::Ones(10);
  CHECK((h * ones).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("coordinate hamiltonian is hermitian") {
  const LatticeConfig cfg{128, 10.0, 1.0, 2.0};
  const MatrixXc h = build_coordinate_hamiltonian(cfg, true).entries;
  CHECK(hermiticity_defect(h) <= 1e-14 * max_abs(h));
}

TEST_CASE("translation conjugates the kinetic part") {
  const LatticeConfig cfg{12, 5.0, 1.0, 0.0};
  const MatrixXc h = build_coordinate_hamiltonian(cfg, false).entries;
  MatrixXc p = MatrixXc::Zero(12, 12);
  for (Index j = 0; j < 12; ++j) p((j + 1) % 12, j) = 1.0;
  CHECK(max_diff(p * h * p.transpose(), h) < 1e-14);
}

TEST_CASE("momentum hamiltonian") {
  const LatticeConfig cfg{2, 4.0, 1.0, 2.0};
  const MatrixXc h = build_momentum_hamiltonian(cfg, true).entries;
  MatrixXc expected(2, 2);
  double k[2];
  for (int n = 0; n < 2; ++n) k[n] = 2 * std::numbers::pi / 4.0 * (-1.0 + n);
  expected << k[0] * k[0] / 2 + 0.5, 0.5, 0.5, k[1] * k[1] / 2 + 0.5;
  CHECK(max_diff(h, expected) < 1e-15);
  CHECK(h(0, 0).real() == doctest::Approx(std::numbers::pi * std::numbers::pi / 8 + 0.5));

  const LatticeConfig big{16, 6.0, 1.0, 3.0};
  const MatrixXc h0 = build_momentum_hamiltonian(big, false).entries;
  CHECK(h0(8, 8) == Complex(0.0));
  MatrixXc off = h0;
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("free coordinate and momentum spectra agree at low energy") {
  double last = 1e9;
  for (Index n : {16, 32, 64, 128}) {
    const LatticeConfig cfg{n, 8.0, 1.0, 0.0};
    const VectorXr ec = sorted_eigenvalues(build_coordinate_hamiltonian(cfg, false).entries);
    const VectorXr em = sorted_eigenvalues(build_momentum_hamiltonian(cfg, false).entries);
    const double a = cfg.spacing();
    std::vector<double> ring, cont;
    for (Index j = 0; j < n; ++j) {
      const Index q = j <= n / 2 ? j : j - n;
      const double s = std::sin(std::numbers::pi * static_cast<double>(q) / static_cast<double>(n));
      ring.push_back(2 / (cfg.m * a * a) * s * s);
      const double k = 2 * std::numbers::pi * static_cast<double>(q) / cfg.L;
      cont.push_back(k * k / (2 * cfg.m));
    }
    std::sort(ring.begin(), ring.end());
    std::sort(cont.begin(), cont.end());
    for (Index i = 0; i < n; ++i) {
      CHECK(std::abs(ec(i) - ring[static_cast<std::size_t>(i)]) < 1e-9 * (1 + ring.back()));
      CHECK(std::abs(em(i) - cont[static_cast<std::size_t>(i)]) < 1e-12 * (1 + cont.back()));
    }
    const double rel = std::abs(ec(1) - em(1)) / em(1);
    CHECK(rel < last);
    last = rel;
  }
  CHECK(last < 0.03);
}

TEST_CASE("iL rotation") {
  const LatticeConfig cfg{2, 4.0, 1.0, 2.0};
  const HamiltonianMatrix h = build_iL_rotated_hamiltonian(cfg, true);
  CHECK_FALSE(h.hermitian);
  CHECK(h.rotation == Rotation::iL);
  CHECK(std::abs(h.entries(0, 0) - Complex(-1.0 / 16, -0.25)) < 1e-15);
  CHECK(std::abs(h.entries(1, 1) - Complex(-1.0 / 16, -0.25)) < 1e-15);
  CHECK(std::abs(h.entries(0, 1) - Complex(2.0 / 32, 0)) < 1e-15);

  // a -> i a substituted into the unrotated formula.
  const LatticeConfig big{8, 5.0, 1.2, 1.5};
  const Complex ia(0, big.spacing());
  const Complex hop = -1.0 / (2 * big.m * ia * ia);
  MatrixXc expected = MatrixXc::Zero(8, 8);
  for (Index j = 0; j < 8; ++j) {
    expected(j, (j + 1) % 8) += hop;
    expected((j + 1) % 8, j) += hop;
    expected(j, j) += 1.0 / (big.m * ia * ia);
  }
  expected(3, 3) += big.V0 / (2.0 * ia);
  expected(4, 4) += big.V0 / (2.0 * ia);
  CHECK(max_diff(build_iL_rotated_hamiltonian(big, true).entries, expected) < 1e-14);
  CHECK(hermiticity_defect(build_iL_rotated_hamiltonian(big, true).entries) > 0.1);

  const VectorXr free = sorted_eigenvalues(build_coordinate_hamiltonian(big, false).entries);
  VectorXr rotated = sorted_eigenvalues(build_iL_rotated_hamiltonian(big, false).entries);
  std::sort(rotated.data(), rotated.data() + rotated.size(), std::greater<>());
  CHECK((rotated + free).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lattice validation") {
  CHECK_THROWS_AS(LatticeConfig({1, 1.0, 1.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(LatticeConfig({4, -1.0, 1.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(LatticeConfig({4, 1.0, 0.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(build_coordinate_hamiltonian({5, 1.0, 1.0, 1.0}, true), ConfigError);
  CHECK_NOTHROW(build_momentum_hamiltonian({5, 1.0, 1.0, 1.0}, true));
  CHECK(parse_placement("single") == DeltaPlacement::single_site);
  CHECK_THROWS_AS(parse_placement("middle"), ConfigError);
}
