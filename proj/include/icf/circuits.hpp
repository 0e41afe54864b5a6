#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "icf/dense.hpp"
#include "icf/lattice.hpp"
#include "icf/pauli.hpp"

namespace icf {

enum class GateKind { X, Y, Z, H, S, Sdg, RX, RZ, Phase, GlobalPhase, CX, MCX, CPhase };

std::string to_string(GateKind k);
GateKind parse_gate_kind(const std::string& name);

/// One gate. Multi-qubit kinds carry their controls explicitly: CX and MCX
/// are X on `target` controlled on every qubit in `controls`, CPhase is
/// Phase likewise. Any kind may carry extra controls after controlled().
///
/// GlobalPhase(theta) multiplies the state by exp(i theta). It has no target
/// until it is controlled, at which point it becomes Phase(theta) on its
/// first control.
struct Gate {
  GateKind kind = GateKind::X;
  int target = -1;
  std::vector<int> controls;
  double angle = 0.0;

  /// Qubits the gate touches, controls first.
  std::vector<int> support() const;
  /// 2x2 action on the target when all controls are set.
  Eigen::Matrix2cd matrix() const;
  Gate inverse() const;
};

Gate x(int q);
Gate y(int q);
Gate z(int q);
Gate h(int q);
Gate s(int q);
Gate sdg(int q);
Gate rx(int q, double theta);
Gate rz(int q, double theta);
Gate phase(int q, double theta);
Gate global_phase(double theta);
Gate cx(int control, int target);
Gate mcx(std::vector<int> controls, int target);
Gate cphase(std::vector<int> controls, int target, double theta);

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(int width);

  int width() const { return width_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  /// Sum of the uncontrolled GlobalPhase angles.
  double global_phase() const;

  Circuit& add(Gate g);
  Circuit& append(const Circuit& other);

  /// Reversed, with every gate inverted.
  Circuit inverse() const;

  /// Every gate gains `control` as its first control; uncontrolled
  /// GlobalPhase(theta) becomes Phase(theta) on `control`. The result is
  /// max(width, control + 1) wide.
  Circuit controlled(int control) const;

  /// One gate per line: kind, target, controls, angle.
  std::string to_text() const;
  static Circuit from_text(const std::string& text);

 private:
  void validate(const Gate& g) const;

  int width_ = 1;
  std::vector<Gate> gates_;
};

/// Applies g to each column of `states` (2^width rows). Qubit 0 is the least
/// significant bit of the row index.
void apply_gate(const Gate& g, Eigen::Ref<MatrixXc> states);

/// Applies an arbitrary 2x2 operator on `target`, gated on all `controls`.
void apply_single_qubit(const Eigen::Matrix2cd& u, int target, const std::vector<int>& controls,
                        Eigen::Ref<MatrixXc> states);

void apply_circuit(const Circuit& c, Eigen::Ref<MatrixXc> states);
VectorXc simulate(const Circuit& c, Index basis_state = 0);

/// Dense unitary, column j = circuit applied to |j>.
MatrixXc dense_matrix(const Circuit& c);

// ---------------------------------------------------------------------------
// Lattice Hamiltonians as Pauli sums (N = 2^G grid points)
// ---------------------------------------------------------------------------

/// Diagonal part H_v = 1/(m a^2) + V(x). The first term is the 1/(m a^2)
/// identity; the potential terms follow, and for G = 1 the potential's own
/// identity term is kept separate.
PauliSum pauli_terms_Hv(const LatticeConfig& cfg);

/// Momentum-space kinetic term (2 pi / L)^2 / 2m * U^2 with
/// U^2 = (4^G + 2)/12 I + sum_a 2^a/2 Z_a + sum_{a>b} 2^(a+b)/2 Z_a Z_b.
PauliSum pauli_terms_H1(const LatticeConfig& cfg);

/// Momentum-space interaction (V0 / L) * sum over all X-insertions.
PauliSum pauli_terms_H2(const LatticeConfig& cfg);

/// Hopping within pairs (2k, 2k+1) and across pairs (2k+1, 2k+2 mod N), and
/// the diagonal; H_a + H_b + H_v equals the coordinate Hamiltonian.
struct CoordinateSplit {
  MatrixXr Ha, Hb, Hv;
};
CoordinateSplit coordinate_split(const LatticeConfig& cfg);

/// Cyclic |n> -> |n+1 mod 2^G> from an MCX ladder, and its inverse.
Circuit increment_circuit(int width);
Circuit decrement_circuit(int width);

/// exp(-i theta Z_S) for the Z-string on `qubits`: CX ladder onto the last
/// (highest) qubit, RZ(2 theta), mirrored ladder. Empty S is a global phase.
Circuit z_string_exponential(int width, std::vector<int> qubits, double theta);

Circuit circuit_exp_Ha(const LatticeConfig& cfg, double dt);
Circuit circuit_exp_Hb(const LatticeConfig& cfg, double dt);
Circuit circuit_exp_Hv(const LatticeConfig& cfg, double dt);
Circuit circuit_exp_H1(const LatticeConfig& cfg, double dt);
/// Exact: H^G X^G C^(G-1)Phase(-N V0 dt / L) X^G H^G.
Circuit circuit_exp_H2(const LatticeConfig& cfg, double dt);

/// First-order product, each step the operator
/// exp(-i Ha dt) exp(-i Hb dt) exp(-i Hv dt) (coordinate) or
/// exp(-i H1 dt) exp(-i H2 dt) (momentum), dt = t / steps.
/// For G = 1 the coordinate step is the exact single-qubit form
/// GlobalPhase(-(1/(m a^2) + V0/(2a)) dt) RX(-2 dt / (m a^2)).
Circuit trotter_evolution(const LatticeConfig& cfg, Basis basis, double t, int steps);

/// Number of two-qubit gate applications, with a gate on q >= 3 qubits
/// counted as q - 1.
int two_qubit_gate_count(const Circuit& c);

// ---------------------------------------------------------------------------
// Hadamard test
// ---------------------------------------------------------------------------

enum class Part { re, im };

/// Width G + 1 with the ancilla on qubit G: X gates preparing |alpha>,
/// H on the ancilla, S for the imaginary part, controlled-U, H.
Circuit hadamard_test_circuit(const Circuit& u, Index alpha, Part part);

struct HadamardEstimate {
  double value = 0;   ///< Re or Im of <alpha|U|alpha>
  double stderr_ = 0;  ///< 2 sqrt(p(1-p)/shots); 0 in exact mode
  double p0 = 0;
  double p1 = 0;
};

/// Converts ancilla probabilities into the estimator: P0 - P1 for Re,
/// P1 - P0 for Im.
double hadamard_value(double p0, double p1, Part part);

/// Exact when `shots` is empty, else a binomial draw of the ancilla.
HadamardEstimate hadamard_test(const Circuit& u, Index alpha, Part part,
                               std::optional<std::uint64_t> shots = std::nullopt,
                               std::mt19937_64* rng = nullptr);

struct TraceEstimate {
  Complex value;
  double stderr_re = 0;
  double stderr_im = 0;
};

/// C(t) = sum_alpha <alpha|U(t)|alpha> from 2N Hadamard tests on the
/// Trotter circuit. Seeds one stream per (alpha, part) from `seed`.
TraceEstimate icf_trace_estimate(const LatticeConfig& cfg, Basis basis, double t, int steps,
                                 std::optional<std::uint64_t> shots = std::nullopt,
                                 std::uint64_t seed = 0);

/// Delta C(t) = C(t) - C0(t), the free run using V0 = 0. Errors add in
/// quadrature.
TraceEstimate icf_difference_estimate(const LatticeConfig& cfg, Basis basis, double t, int steps,
                                      std::optional<std::uint64_t> shots = std::nullopt,
                                      std::uint64_t seed = 0);

}  // namespace icf
