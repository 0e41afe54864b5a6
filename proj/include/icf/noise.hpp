#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "icf/circuits.hpp"
#include "icf/dense.hpp"

namespace icf {

/// Per-gate error rates and thermal parameters. T1/T2 in microseconds, gate
/// durations in nanoseconds. Thermal relaxation is off unless `thermal` is
/// set; a zero probability switches the corresponding channel off.
struct NoiseModel {
  std::string name = "ideal";
  double readout_p = 0;
  double depol1 = 0;
  double depol2 = 0;
  bool thermal = false;
  double T1 = 250;
  double T2 = 150;
  double dur1 = 50;
  double dur2 = 100;

  void validate() const;
  bool noiseless() const { return depol1 == 0 && depol2 == 0 && !thermal; }
};

/// "ideal", "heron-median", "eagle-median".
NoiseModel noise_preset(const std::string& name);
std::vector<std::string> noise_preset_names();

class DensityMatrix {
 public:
  explicit DensityMatrix(int width);  ///< |0...0><0...0|
  static DensityMatrix from_state(const VectorXc& psi);

  int width() const { return width_; }
  const MatrixXc& entries() const { return rho_; }
  MatrixXc& entries() { return rho_; }

  double trace_defect() const;
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  /// Throws NumericalError when trace, Hermiticity or positivity is off by
  /// more than `tol` (positivity uses -tol).
  void check(double tol = 1e-10) const;

  /// Probability of reading 1 on qubit q.
  double probability_one(int q) const;

 private:
  int width_;
  MatrixXc rho_;
};

struct Depolarizing {
  double p = 0;
  std::vector<int> qubits;
};

/// Amplitude damping then dephasing so that, over `duration_ns`, the
/// excited population decays as exp(-d/T1) and coherences as exp(-d/T2).
struct Thermal {
  double T1_us = 0;
  double T2_us = 0;
  double duration_ns = 0;
  int qubit = 0;
};

using Channel = std::variant<Depolarizing, Thermal>;

void apply_unitary(const Gate& g, DensityMatrix& rho);
void apply_channel(const Channel& ch, DensityMatrix& rho);

/// Invoked after each gate and its noise, with the gate index.
using GateObserver = std::function<void(std::size_t, const DensityMatrix&)>;

inline constexpr int kMaxNoisyWidth = 4;

/// Runs the circuit from |0...0>. After each gate: depol1 + thermal(dur1)
/// on one-qubit support, depol2 + thermal(dur2) on two-qubit support; a
/// gate on q >= 3 qubits is charged as q - 1 two-qubit gates on the pairs
/// (first control, other qubit). Uncontrolled global phases are noiseless.
DensityMatrix noisy_simulate(const Circuit& c, const NoiseModel& noise,
                             const GateObserver& observer = {});

struct ReadoutResult {
  double p0 = 0;
  double p1 = 0;
};

/// Symmetric confusion map on qubit q, then an optional binomial draw.
ReadoutResult measure_with_readout(const DensityMatrix& rho, int qubit, double readout_p,
                                   std::optional<std::uint64_t> shots = std::nullopt,
                                   std::mt19937_64* rng = nullptr);

/// Hadamard test of <alpha|U(t)|alpha> over a time grid.
struct Experiment {
  LatticeConfig cfg;
  Basis basis = Basis::coordinate;
  double dt = 0.04;
  std::vector<double> times;  ///< each a multiple of dt
  Index alpha = 0;
  Part part = Part::re;
};

struct ExperimentSummary {
  NoiseModel noise;
  std::vector<double> times;
  std::vector<double> ideal;
  std::vector<double> exact_noisy;  ///< infinite-shot value under noise
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> lower;  ///< mean - 1.96 sd
  std::vector<double> upper;  ///< mean + 1.96 sd
  std::vector<int> two_qubit_gates;
  int repetitions = 0;
  std::uint64_t shots = 0;  ///< 0 means exact probabilities
};

/// For each noise model and time: the noisy density matrix once, then
/// `repetitions` readout draws of `shots` each, one seeded stream per
/// (model, time, repetition). shots = 0 uses exact probabilities.
std::vector<ExperimentSummary> run_noise_sweep(const Experiment& exp,
                                               const std::vector<NoiseModel>& grid,
                                               int repetitions, std::uint64_t shots,
                                               std::uint64_t seed);

/// The sweeps behind each separated-channel study.
std::vector<NoiseModel> default_sweep(const std::string& channel);

}  // namespace icf
