#include "icf/noise.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace icf {

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0 && p <= 1)) throw ConfigError(std::string("noise: ") + name + " must lie in [0, 1]");
}

void check_thermal(double T1, double T2, double duration) {
  if (!(T1 > 0) || !(T2 > 0)) throw ConfigError("noise: T1 and T2 must be positive");
  if (T2 > 2 * T1) throw ConfigError("noise: T2 must not exceed 2 T1");
  if (!(duration >= 0)) throw ConfigError("noise: gate durations must be >= 0");
}

// rho -> K rho K^dagger on one qubit.
MatrixXc conjugate(const Eigen::Matrix2cd& k, int q, const MatrixXc& rho) {
  MatrixXc tmp = rho;
  apply_single_qubit(k, q, {}, tmp);
  tmp.adjointInPlace();
  apply_single_qubit(k, q, {}, tmp);
  tmp.adjointInPlace();
  return tmp;
}

void twirl(const Depolarizing& d, DensityMatrix& rho) {
  const auto k = d.qubits.size();
  const std::size_t count = std::size_t{1} << (2 * k);
  MatrixXc mixed = MatrixXc::Zero(rho.entries().rows(), rho.entries().cols());
  static const Eigen::Matrix2cd paulis[4] = {
      Eigen::Matrix2cd::Identity(), x(0).matrix(), y(0).matrix(), z(0).matrix()};
  for (std::size_t word = 0; word < count; ++word) {
    MatrixXc term = rho.entries();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t letter = (word >> (2 * i)) & 3;
      if (letter != 0) term = conjugate(paulis[letter], d.qubits[i], term);
    }
    mixed += term;
  }
  rho.entries() = (1 - d.p) * rho.entries() + (d.p / static_cast<double>(count)) * mixed;
}

void relax(const Thermal& t, DensityMatrix& rho) {
  const double d_us = t.duration_ns / 1000.0;
  const double gamma = 1 - std::exp(-d_us / t.T1_us);
  // Amplitude damping leaves coherences at exp(-d/2T1); dephasing tops them
  // up to exp(-d/T2).
  const double f = std::exp(-d_us * (1 / t.T2_us - 1 / (2 * t.T1_us)));
  Eigen::Matrix2cd k0, k1;
  k0 << 1, 0, 0, std::sqrt(1 - gamma);
  k1 << 0, std::sqrt(gamma), 0, 0;
  MatrixXc out = conjugate(k0, t.qubit, rho.entries());
  if (gamma > 0) out += conjugate(k1, t.qubit, rho.entries());
  if (f < 1) {
    const Eigen::Matrix2cd p0 = std::sqrt((1 + f) / 2) * Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd p1 = std::sqrt((1 - f) / 2) * z(0).matrix();
    out = conjugate(p0, t.qubit, out) + conjugate(p1, t.qubit, out);
  }
  rho.entries() = std::move(out);
}

}  // namespace

void NoiseModel::validate() const {
  check_probability(readout_p, "readout_p");
  if (readout_p >= 0.5) throw ConfigError("noise: readout_p must be below 1/2");
  check_probability(depol1, "depol1");
  check_probability(depol2, "depol2");
  if (thermal) {
    check_thermal(T1, T2, dur1);
    check_thermal(T1, T2, dur2);
  }
}

NoiseModel noise_preset(const std::string& name) {
  NoiseModel n;
  n.name = name;
  if (name == "ideal") return n;
  if (name == "heron-median") {
    n.readout_p = 0.01;
    n.depol1 = 0.0002;
    n.depol2 = 0.002;
    n.thermal = true;
    n.T1 = 250;
    n.T2 = 150;
    n.dur1 = 50;
    n.dur2 = 100;
    return n;
  }
  if (name == "eagle-median") {
    n.readout_p = 0.02;
    n.depol1 = 0.0002;
    n.depol2 = 0.008;
    n.thermal = true;
    n.T1 = 250;
    n.T2 = 150;
    n.dur1 = 50;
    n.dur2 = 500;
    return n;
  }
  throw ConfigError("unknown noise preset '" + name + "'");
}

std::vector<std::string> noise_preset_names() { return {"ideal", "heron-median", "eagle-median"}; }

std::vector<NoiseModel> default_sweep(const std::string& channel) {
  std::vector<NoiseModel> out;
  auto label = [](const std::string& base, double v) {
    std::ostringstream os;
    os << base << "=" << v;
    return os.str();
  };
  if (channel == "readout") {
    for (double p : {0.001, 0.005, 0.01, 0.05}) {
      NoiseModel n;
      n.name = label("readout", p);
      n.readout_p = p;
      out.push_back(n);
    }
  } else if (channel == "single") {
    for (double p : {0.0001, 0.0005, 0.001}) {
      NoiseModel n;
      n.name = label("depol1", p);
      n.depol1 = p;
      out.push_back(n);
    }
  } else if (channel == "two") {
    for (double p : {0.0025, 0.005, 0.01}) {
      NoiseModel n;
      n.name = label("depol2", p);
      n.depol2 = p;
      out.push_back(n);
    }
  } else if (channel == "thermal") {
    const std::pair<double, double> times[] = {{100, 50}, {150, 100}, {250, 150}};
    for (double dur2 : {100.0, 250.0, 500.0}) {
      for (const auto& [t1, t2] : times) {
        NoiseModel n;
        std::ostringstream os;
        os << "thermal T1=" << t1 << " T2=" << t2 << " dur2=" << dur2;
        n.name = os.str();
        n.thermal = true;
        n.T1 = t1;
        n.T2 = t2;
        n.dur1 = 50;
        n.dur2 = dur2;
        out.push_back(n);
      }
    }
  } else if (channel == "median") {
    out.push_back(noise_preset("heron-median"));
    out.push_back(noise_preset("eagle-median"));
  } else {
    throw ConfigError("unknown sweep channel '" + channel + "' (readout|single|two|thermal|median)");
  }
  return out;
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(int width) : width_(width) {
  if (width < 1 || width > 12) throw ConfigError("density matrix width must be in [1, 12]");
  const Index dim = Index{1} << width;
  rho_ = MatrixXc::Zero(dim, dim);
  rho_(0, 0) = 1.0;
}

DensityMatrix DensityMatrix::from_state(const VectorXc& psi) {
  const Index dim = psi.size();
  if (!is_power_of_two(dim) || dim < 2) throw ConfigError("from_state: size must be a power of two");
  DensityMatrix d(exact_log2(dim));
  d.rho_ = psi * psi.adjoint();
  return d;
}

double DensityMatrix::trace_defect() const { return std::abs(rho_.trace() - 1.0); }

double DensityMatrix::hermiticity_defect() const { return icf::hermiticity_defect(rho_); }

double DensityMatrix::min_eigenvalue() const {
  const MatrixXc sym = (rho_ + rho_.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::check(double tol) const {
  std::ostringstream os;
  if (trace_defect() > tol) os << " trace off by " << trace_defect() << ";";
  if (hermiticity_defect() > tol) os << " non-Hermitian by " << hermiticity_defect() << ";";
  if (min_eigenvalue() < -tol) os << " min eigenvalue " << min_eigenvalue() << ";";
  if (!os.str().empty()) throw NumericalError("density matrix invariant violated:" + os.str());
}

double DensityMatrix::probability_one(int q) const {
  if (q < 0 || q >= width_) throw ConfigError("probability_one: qubit out of range");
  const Index bit = Index{1} << q;
  double p = 0;
  for (Index i = 0; i < rho_.rows(); ++i) {
    if (i & bit) p += rho_(i, i).real();
  }
  return p;
}

void apply_unitary(const Gate& g, DensityMatrix& rho) {
  MatrixXc& m = rho.entries();
  if (g.kind == GateKind::GlobalPhase && g.controls.empty()) return;
  apply_gate(g, m);
  m.adjointInPlace();
  apply_gate(g, m);
  m.adjointInPlace();
}

void apply_channel(const Channel& ch, DensityMatrix& rho) {
  if (const auto* d = std::get_if<Depolarizing>(&ch)) {
    check_probability(d->p, "depolarizing p");
    if (d->qubits.empty()) throw ConfigError("depolarizing: no target qubits");
    for (int q : d->qubits) {
      if (q < 0 || q >= rho.width()) throw ConfigError("depolarizing: qubit out of range");
    }
    if (d->p > 0) twirl(*d, rho);
    return;
  }
  const auto& t = std::get<Thermal>(ch);
  check_thermal(t.T1_us, t.T2_us, t.duration_ns);
  if (t.qubit < 0 || t.qubit >= rho.width()) throw ConfigError("thermal: qubit out of range");
  if (t.duration_ns > 0) relax(t, rho);
}

DensityMatrix noisy_simulate(const Circuit& c, const NoiseModel& noise, const GateObserver& observer) {
  noise.validate();
  if (c.width() > kMaxNoisyWidth) {
    throw ConfigError("noisy_simulate: width " + std::to_string(c.width()) + " exceeds the cap " +
                      std::to_string(kMaxNoisyWidth));
  }
  DensityMatrix rho(c.width());
  auto thermal = [&](int q, double dur) {
    if (noise.thermal) apply_channel(Thermal{noise.T1, noise.T2, dur, q}, rho);
  };
  for (std::size_t i = 0; i < c.gates().size(); ++i) {
    const Gate& g = c.gates()[i];
    apply_unitary(g, rho);
    const std::vector<int> sup = g.support();
    if (sup.size() == 1) {
      if (noise.depol1 > 0) apply_channel(Depolarizing{noise.depol1, sup}, rho);
      thermal(sup[0], noise.dur1);
    } else if (sup.size() >= 2) {
      for (std::size_t k = 1; k < sup.size(); ++k) {
        if (noise.depol2 > 0) apply_channel(Depolarizing{noise.depol2, {sup[0], sup[k]}}, rho);
        thermal(sup[0], noise.dur2);
        thermal(sup[k], noise.dur2);
      }
    }
    if (observer) observer(i, rho);
  }
  return rho;
}

ReadoutResult measure_with_readout(const DensityMatrix& rho, int qubit, double readout_p,
                                   std::optional<std::uint64_t> shots, std::mt19937_64* rng) {
  check_probability(readout_p, "readout_p");
  if (readout_p >= 0.5) throw ConfigError("readout_p must be below 1/2");
  const double p1 = std::clamp(rho.probability_one(qubit), 0.0, 1.0);
  const double p0 = 1 - p1;
  ReadoutResult r;
  r.p1 = (1 - readout_p) * p1 + readout_p * p0;
  r.p0 = (1 - readout_p) * p0 + readout_p * p1;
  if (!shots) return r;
  if (*shots == 0) throw ConfigError("measure_with_readout: shots must be > 0");
  if (rng == nullptr) throw ConfigError("measure_with_readout: shot mode needs a random stream");
  std::binomial_distribution<std::uint64_t> draw(*shots, std::clamp(r.p1, 0.0, 1.0));
  const double n = static_cast<double>(*shots);
  r.p1 = static_cast<double>(draw(*rng)) / n;
  r.p0 = 1 - r.p1;
  return r;
}

namespace {

ExperimentSummary sweep_one(const Experiment& exp, const NoiseModel& noise, std::size_t model_index,
                            int repetitions, std::uint64_t shots, std::uint64_t seed) {
  ExperimentSummary s;
  s.noise = noise;
  s.times = exp.times;
  s.repetitions = repetitions;
  s.shots = shots;
  const int anc = exact_log2(exp.cfg.N);
  for (std::size_t ti = 0; ti < exp.times.size(); ++ti) {
    const double t = exp.times[ti];
    const int steps = std::max(1, static_cast<int>(std::lround(t / exp.dt)));
    const Circuit u = trotter_evolution(exp.cfg, exp.basis, t, steps);
    const Circuit hc = hadamard_test_circuit(u, exp.alpha, exp.part);
    s.two_qubit_gates.push_back(two_qubit_gate_count(hc));
    s.ideal.push_back(hadamard_test(u, exp.alpha, exp.part).value);

    const DensityMatrix rho = noisy_simulate(hc, noise);
    const ReadoutResult exact = measure_with_readout(rho, anc, noise.readout_p);
    s.exact_noisy.push_back(hadamard_value(exact.p0, exact.p1, exp.part));

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(repetitions));
    for (int r = 0; r < repetitions; ++r) {
      if (shots == 0) {
        values.push_back(s.exact_noisy.back());
        continue;
      }
      std::seed_seq seq{seed, static_cast<std::uint64_t>(model_index), static_cast<std::uint64_t>(ti),
                        static_cast<std::uint64_t>(r)};
      std::mt19937_64 rng(seq);
      const ReadoutResult m = measure_with_readout(rho, anc, noise.readout_p, shots, &rng);
      values.push_back(hadamard_value(m.p0, m.p1, exp.part));
    }
    double mean = 0;
    for (double v : values) mean += v;
    mean /= repetitions;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) mean = *lo;
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / (repetitions - 1));
    s.mean.push_back(mean);
    s.sd.push_back(sd);
    s.lower.push_back(mean - 1.96 * sd);
    s.upper.push_back(mean + 1.96 * sd);
  }
  return s;
}

}  // namespace

std::vector<ExperimentSummary> run_noise_sweep(const Experiment& exp, const std::vector<NoiseModel>& grid,
                                               int repetitions, std::uint64_t shots, std::uint64_t seed) {
  if (repetitions < 2) throw ConfigError("run_noise_sweep: repetitions must be >= 2");
  if (!(exp.dt > 0)) throw ConfigError("run_noise_sweep: dt must be > 0");
  for (const auto& n : grid) n.validate();
  for (std::size_t i = 1; i < exp.times.size(); ++i) {
    if (!(exp.times[i] > exp.times[i - 1])) throw ConfigError("run_noise_sweep: times must increase");
  }
  if (!exp.times.empty() && exp.times.front() < 0) throw ConfigError("run_noise_sweep: negative time");
  std::vector<std::future<ExperimentSummary>> jobs;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, sweep_one, std::cref(exp), std::cref(grid[i]), i,
                              repetitions, shots, seed));
  }
  std::vector<ExperimentSummary> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace icf
