#include "icf/lattice.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace icf {

void LatticeConfig::validate() const {
  if (N < 2) throw ConfigError("lattice: N must be >= 2, got " + std::to_string(N));
  if (!(L > 0) || !std::isfinite(L)) throw ConfigError("lattice: L must be positive and finite");
  if (!(m > 0) || !std::isfinite(m)) throw ConfigError("lattice: m must be positive and finite");
  if (!std::isfinite(V0)) throw ConfigError("lattice: V0 must be finite");
}

std::string to_string(Basis b) {
  switch (b) {
    case Basis::coordinate: return "coordinate";
    case Basis::momentum: return "momentum";
    case Basis::field: return "field";
  }
  return "unknown";
}

std::string to_string(DeltaPlacement p) {
  return p == DeltaPlacement::split_pair ? "split" : "single";
}

DeltaPlacement parse_placement(const std::string& name) {
  if (name == "split" || name == "split_pair") return DeltaPlacement::split_pair;
  if (name == "single" || name == "single_site") return DeltaPlacement::single_site;
  throw ConfigError("unknown delta placement '" + name + "' (expected split|single)");
}

std::string HamiltonianMatrix::describe() const {
  std::ostringstream os;
  os << to_string(basis) << " Hamiltonian, dim " << dim()
     << (rotation == Rotation::iL ? ", iL-rotated" : "")
     << (hermitian ? ", hermitian" : ", non-hermitian");
  return os.str();
}

namespace {

void require_even(const LatticeConfig& cfg) {
  if (cfg.N % 2 != 0) {
    throw ConfigError("lattice: coordinate builder needs even N for the delta site, got " +
                      std::to_string(cfg.N));
  }
}

}  // namespace

VectorXr contact_potential(const LatticeConfig& cfg) {
  cfg.validate();
  require_even(cfg);
  const double a = cfg.spacing();
  VectorXr v = VectorXr::Zero(cfg.N);
  const Index mid = cfg.N / 2;
  if (cfg.placement == DeltaPlacement::split_pair) {
    v(mid - 1) = cfg.V0 / (2 * a);
    v(mid) = cfg.V0 / (2 * a);
  } else {
    v(mid) = cfg.V0 / a;
  }
  return v;
}

VectorXr momentum_modes(const LatticeConfig& cfg) {
  cfg.validate();
  const double dk = 2 * std::numbers::pi / cfg.L;
  VectorXr k(cfg.N);
  for (Index n = 0; n < cfg.N; ++n) k(n) = dk * (-static_cast<double>(cfg.N) / 2 + n);
  return k;
}

MatrixXr ring_kinetic(const LatticeConfig& cfg) {
  cfg.validate();
  const double a = cfg.spacing();
  const double hop = 1.0 / (2 * cfg.m * a * a);
  const Index n = cfg.N;
  MatrixXr k = MatrixXr::Zero(n, n);
  // N = 2 visits the same bond twice, which doubles the coupling.
  for (Index i = 0; i < n; ++i) {
    const Index j = (i + 1) % n;
    k(i, j) -= hop;
    k(j, i) -= hop;
  }
  k.diagonal().array() += 2 * hop;
  return k;
}

HamiltonianMatrix build_coordinate_hamiltonian(const LatticeConfig& cfg, bool interacting) {
  cfg.validate();
  require_even(cfg);
  MatrixXr h = ring_kinetic(cfg);
  if (interacting) h.diagonal() += contact_potential(cfg);
  return {h.cast<Complex>(), Basis::coordinate, Rotation::none, true};
}

HamiltonianMatrix build_momentum_hamiltonian(const LatticeConfig& cfg, bool interacting) {
  cfg.validate();
  const VectorXr k = momentum_modes(cfg);
  MatrixXr h = MatrixXr::Zero(cfg.N, cfg.N);
  if (interacting) h.setConstant(cfg.V0 / cfg.L);
  h.diagonal().array() += k.array().square() / (2 * cfg.m);
  return {h.cast<Complex>(), Basis::momentum, Rotation::none, true};
}

HamiltonianMatrix build_iL_rotated_hamiltonian(const LatticeConfig& cfg, bool interacting) {
  cfg.validate();
  require_even(cfg);
  MatrixXc h = (-ring_kinetic(cfg)).cast<Complex>();
  if (interacting) {
    const VectorXr v = contact_potential(cfg);
    h.diagonal() -= Complex(0, 1) * v.cast<Complex>();
  }
  return {std::move(h), Basis::coordinate, Rotation::iL, false};
}

}  // namespace icf
