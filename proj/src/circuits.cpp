#include "icf/circuits.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace icf {

namespace {

constexpr Complex kI{0.0, 1.0};

struct KindName {
  GateKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {GateKind::X, "X"},         {GateKind::Y, "Y"},           {GateKind::Z, "Z"},
    {GateKind::H, "H"},         {GateKind::S, "S"},           {GateKind::Sdg, "Sdg"},
    {GateKind::RX, "RX"},       {GateKind::RZ, "RZ"},         {GateKind::Phase, "Phase"},
    {GateKind::GlobalPhase, "GlobalPhase"},                   {GateKind::CX, "CX"},
    {GateKind::MCX, "MCX"},     {GateKind::CPhase, "CPhase"},
};

int lattice_width(const LatticeConfig& cfg) {
  cfg.validate();
  return exact_log2(cfg.N);
}

void require_split(const LatticeConfig& cfg) {
  if (cfg.placement != DeltaPlacement::split_pair) {
    throw ConfigError("circuits: the Z-insertion form of H_v needs the split delta placement");
  }
}

}  // namespace

std::string to_string(GateKind k) {
  for (const auto& e : kKindNames) {
    if (e.kind == k) return e.name;
  }
  return "?";
}

GateKind parse_gate_kind(const std::string& name) {
  for (const auto& e : kKindNames) {
    if (name == e.name) return e.kind;
  }
  throw ConfigError("unknown gate kind '" + name + "'");
}

std::vector<int> Gate::support() const {
  std::vector<int> s = controls;
  if (kind != GateKind::GlobalPhase) s.push_back(target);
  return s;
}

Eigen::Matrix2cd Gate::matrix() const {
  Eigen::Matrix2cd m;
  const double c = std::cos(angle / 2);
  const double sn = std::sin(angle / 2);
  const double r = 1 / std::numbers::sqrt2;
  switch (kind) {
    case GateKind::X:
    case GateKind::CX:
    case GateKind::MCX: m << 0, 1, 1, 0; break;
    case GateKind::Y: m << 0, -kI, kI, 0; break;
    case GateKind::Z: m << 1, 0, 0, -1; break;
    case GateKind::H: m << r, r, r, -r; break;
    case GateKind::S: m << 1, 0, 0, kI; break;
    case GateKind::Sdg: m << 1, 0, 0, -kI; break;
    case GateKind::RX: m << c, -kI * sn, -kI * sn, c; break;
    case GateKind::RZ: m << std::exp(-kI * (angle / 2)), 0, 0, std::exp(kI * (angle / 2)); break;
    case GateKind::Phase:
    case GateKind::CPhase: m << 1, 0, 0, std::exp(kI * angle); break;
    case GateKind::GlobalPhase: m = std::exp(kI * angle) * Eigen::Matrix2cd::Identity(); break;
  }
  return m;
}

Gate Gate::inverse() const {
  Gate g = *this;
  switch (kind) {
    case GateKind::S: g.kind = GateKind::Sdg; break;
    case GateKind::Sdg: g.kind = GateKind::S; break;
    case GateKind::RX:
    case GateKind::RZ:
    case GateKind::Phase:
    case GateKind::CPhase:
    case GateKind::GlobalPhase: g.angle = -angle; break;
    default: break;
  }
  return g;
}

Gate x(int q) { return {GateKind::X, q, {}, 0.0}; }
Gate y(int q) { return {GateKind::Y, q, {}, 0.0}; }
Gate z(int q) { return {GateKind::Z, q, {}, 0.0}; }
Gate h(int q) { return {GateKind::H, q, {}, 0.0}; }
Gate s(int q) { return {GateKind::S, q, {}, 0.0}; }
Gate sdg(int q) { return {GateKind::Sdg, q, {}, 0.0}; }
Gate rx(int q, double theta) { return {GateKind::RX, q, {}, theta}; }
Gate rz(int q, double theta) { return {GateKind::RZ, q, {}, theta}; }
Gate phase(int q, double theta) { return {GateKind::Phase, q, {}, theta}; }
Gate global_phase(double theta) { return {GateKind::GlobalPhase, -1, {}, theta}; }
Gate cx(int control, int target) { return {GateKind::CX, target, {control}, 0.0}; }
Gate mcx(std::vector<int> controls, int target) {
  return {GateKind::MCX, target, std::move(controls), 0.0};
}
Gate cphase(std::vector<int> controls, int target, double theta) {
  return {GateKind::CPhase, target, std::move(controls), theta};
}

// ---------------------------------------------------------------------------

Circuit::Circuit(int width) : width_(width) {
  if (width < 1 || width > 24) throw ConfigError("circuit width must be in [1, 24]");
}

void Circuit::validate(const Gate& g) const {
  if (!std::isfinite(g.angle)) throw ConfigError("gate " + to_string(g.kind) + ": non-finite angle");
  std::vector<int> sup = g.support();
  for (int q : sup) {
    if (q < 0 || q >= width_) {
      throw ConfigError("gate " + to_string(g.kind) + ": qubit " + std::to_string(q) +
                        " outside width " + std::to_string(width_));
    }
  }
  std::sort(sup.begin(), sup.end());
  if (std::adjacent_find(sup.begin(), sup.end()) != sup.end()) {
    throw ConfigError("gate " + to_string(g.kind) + ": targets and controls overlap");
  }
  if (g.kind == GateKind::CX && g.controls.size() != 1) throw ConfigError("CX needs one control");
  if ((g.kind == GateKind::MCX || g.kind == GateKind::CPhase) && g.controls.empty()) {
    throw ConfigError(to_string(g.kind) + " needs at least one control");
  }
}

double Circuit::global_phase() const {
  double total = 0;
  for (const auto& g : gates_) {
    if (g.kind == GateKind::GlobalPhase && g.controls.empty()) total += g.angle;
  }
  return total;
}

Circuit& Circuit::add(Gate g) {
  validate(g);
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.width_ > width_) throw ConfigError("append: circuit is wider than the target");
  for (const auto& g : other.gates_) add(g);
  return *this;
}

Circuit Circuit::inverse() const {
  Circuit out(width_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.gates_.push_back(it->inverse());
  return out;
}

Circuit Circuit::controlled(int control) const {
  if (control < 0) throw ConfigError("controlled: negative control index");
  Circuit out(std::max(width_, control + 1));
  for (const auto& g : gates_) {
    Gate c = g;
    if (g.kind == GateKind::GlobalPhase) {
      c = g.controls.empty() ? phase(control, g.angle) : cphase(g.controls, control, g.angle);
    } else if (g.kind == GateKind::CX) {
      c = mcx({control, g.controls.front()}, g.target);
    } else {
      c.controls.insert(c.controls.begin(), control);
    }
    out.add(std::move(c));
  }
  return out;
}

std::string Circuit::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "width " << width_ << "\n";
  for (const auto& g : gates_) {
    os << to_string(g.kind) << " " << g.target << " ";
    if (g.controls.empty()) {
      os << "-";
    } else {
      for (std::size_t i = 0; i < g.controls.size(); ++i) os << (i ? "," : "") << g.controls[i];
    }
    os << " " << g.angle << "\n";
  }
  return os.str();
}

Circuit Circuit::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string word;
  int width = 0;
  if (!(is >> word >> width) || word != "width") throw ConfigError("circuit text: missing width line");
  Circuit c(width);
  std::string kind, controls;
  int target = 0;
  double angle = 0;
  while (is >> kind >> target >> controls >> angle) {
    Gate g{parse_gate_kind(kind), target, {}, angle};
    if (controls != "-") {
      std::istringstream cs(controls);
      std::string tok;
      while (std::getline(cs, tok, ',')) g.controls.push_back(std::stoi(tok));
    }
    c.add(std::move(g));
  }
  if (!is.eof()) throw ConfigError("circuit text: malformed gate line");
  return c;
}

// ---------------------------------------------------------------------------

void apply_single_qubit(const Eigen::Matrix2cd& u, int target, const std::vector<int>& controls,
                        Eigen::Ref<MatrixXc> states) {
  const Index dim = states.rows();
  const Index tbit = Index{1} << target;
  Index cmask = 0;
  for (int q : controls) cmask |= Index{1} << q;
  if (tbit >= dim || cmask >= dim) throw ConfigError("apply_single_qubit: qubit outside the register");
  const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (Index col = 0; col < states.cols(); ++col) {
    Complex* v = states.col(col).data();
    for (Index i = 0; i < dim; ++i) {
      if ((i & tbit) || (i & cmask) != cmask) continue;
      const Index j = i | tbit;
      const Complex a = v[i];
      const Complex b = v[j];
      v[i] = u00 * a + u01 * b;
      v[j] = u10 * a + u11 * b;
    }
  }
}

void apply_gate(const Gate& g, Eigen::Ref<MatrixXc> states) {
  if (g.kind == GateKind::GlobalPhase) {
    if (g.controls.empty()) {
      states *= std::exp(kI * g.angle);
      return;
    }
    const std::vector<int> rest(g.controls.begin() + 1, g.controls.end());
    apply_single_qubit(phase(0, g.angle).matrix(), g.controls.front(), rest, states);
    return;
  }
  apply_single_qubit(g.matrix(), g.target, g.controls, states);
}

void apply_circuit(const Circuit& c, Eigen::Ref<MatrixXc> states) {
  if (states.rows() != (Index{1} << c.width())) throw ConfigError("apply_circuit: state size mismatch");
  for (const auto& g : c.gates()) apply_gate(g, states);
}

VectorXc simulate(const Circuit& c, Index basis_state) {
  const Index dim = Index{1} << c.width();
  if (basis_state < 0 || basis_state >= dim) throw ConfigError("simulate: basis state out of range");
  VectorXc v = VectorXc::Zero(dim);
  v(basis_state) = 1.0;
  apply_circuit(c, v);
  return v;
}

MatrixXc dense_matrix(const Circuit& c) {
  const Index dim = Index{1} << c.width();
  MatrixXc u = MatrixXc::Identity(dim, dim);
  apply_circuit(c, u);
  return u;
}

// ---------------------------------------------------------------------------

PauliSum pauli_terms_Hv(const LatticeConfig& cfg) {
  const int g = lattice_width(cfg);
  require_split(cfg);
  const double a = cfg.spacing();
  PauliSum terms{{1.0 / (cfg.m * a * a), pauli_word(g, {}, 'I')}};
  if (cfg.V0 == 0) return terms;
  const double c = cfg.V0 / (2 * a) / std::ldexp(1.0, g - 1);
  const unsigned top = 1u << (g - 1);
  for (unsigned mask = 0; mask < (1u << g); ++mask) {
    const bool has_top = mask & top;
    const bool odd_low = std::popcount(mask & (top - 1)) % 2 == 1;
    if (has_top != odd_low) continue;
    std::vector<int> qs;
    for (int q = 0; q < g; ++q) {
      if (mask & (1u << q)) qs.push_back(q);
    }
    terms.push_back({has_top ? -c : c, pauli_word(g, qs, 'Z')});
  }
  return terms;
}

PauliSum pauli_terms_H1(const LatticeConfig& cfg) {
  const int g = lattice_width(cfg);
  const double scale = std::pow(2 * std::numbers::pi / cfg.L, 2) / (2 * cfg.m);
  PauliSum terms{{scale * (std::ldexp(1.0, 2 * g) + 2) / 12, pauli_word(g, {}, 'I')}};
  for (int al = 0; al < g; ++al) terms.push_back({scale * std::ldexp(1.0, al) / 2, pauli_word(g, {al}, 'Z')});
  for (int al = 0; al < g; ++al) {
    for (int be = 0; be < al; ++be) {
      terms.push_back({scale * std::ldexp(1.0, al + be) / 2, pauli_word(g, {al, be}, 'Z')});
    }
  }
  return terms;
}

PauliSum pauli_terms_H2(const LatticeConfig& cfg) {
  const int g = lattice_width(cfg);
  PauliSum terms;
  for (unsigned mask = 0; mask < (1u << g); ++mask) {
    std::vector<int> qs;
    for (int q = 0; q < g; ++q) {
      if (mask & (1u << q)) qs.push_back(q);
    }
    terms.push_back({cfg.V0 / cfg.L, pauli_word(g, qs, 'X')});
  }
  return terms;
}

CoordinateSplit coordinate_split(const LatticeConfig& cfg) {
  lattice_width(cfg);
  const Index n = cfg.N;
  const double a = cfg.spacing();
  const double hop = 1.0 / (2 * cfg.m * a * a);
  CoordinateSplit s{MatrixXr::Zero(n, n), MatrixXr::Zero(n, n), MatrixXr::Zero(n, n)};
  for (Index k = 0; k + 1 < n; k += 2) {
    s.Ha(k, k + 1) = s.Ha(k + 1, k) = -hop;
    const Index j = (k + 2) % n;
    s.Hb(k + 1, j) -= hop;
    s.Hb(j, k + 1) -= hop;
  }
  s.Hv.diagonal().setConstant(2 * hop);
  s.Hv.diagonal() += contact_potential(cfg);
  return s;
}

Circuit increment_circuit(int width) {
  Circuit c(width);
  for (int j = width - 1; j >= 1; --j) {
    std::vector<int> controls;
    for (int q = 0; q < j; ++q) controls.push_back(q);
    c.add(j == 1 ? cx(0, 1) : mcx(controls, j));
  }
  c.add(x(0));
  return c;
}

Circuit decrement_circuit(int width) { return increment_circuit(width).inverse(); }

Circuit z_string_exponential(int width, std::vector<int> qubits, double theta) {
  Circuit c(width);
  if (qubits.empty()) {
    c.add(global_phase(-theta));
    return c;
  }
  std::sort(qubits.begin(), qubits.end());
  for (std::size_t k = 0; k + 1 < qubits.size(); ++k) c.add(cx(qubits[k], qubits[k + 1]));
  c.add(rz(qubits.back(), 2 * theta));
  for (std::size_t k = qubits.size() - 1; k-- > 0;) c.add(cx(qubits[k], qubits[k + 1]));
  return c;
}

namespace {

std::vector<int> z_qubits(const PauliTerm& t) {
  std::vector<int> qs;
  for (int q = 0; q < t.width(); ++q) {
    if (t.on(q) == 'Z') qs.push_back(q);
  }
  return qs;
}

Circuit diagonal_exponential(int width, const PauliSum& terms, double dt) {
  Circuit c(width);
  for (const auto& t : terms) {
    if (!is_diagonal(t) || t.coefficient.imag() != 0) {
      throw ConfigError("diagonal_exponential: term " + to_string(t) + " is not real diagonal");
    }
    c.append(z_string_exponential(width, z_qubits(t), t.coefficient.real() * dt));
  }
  return c;
}

}  // namespace

Circuit circuit_exp_Ha(const LatticeConfig& cfg, double dt) {
  const int g = lattice_width(cfg);
  const double a = cfg.spacing();
  Circuit c(g);
  c.add(rx(0, -dt / (cfg.m * a * a)));
  return c;
}

Circuit circuit_exp_Hb(const LatticeConfig& cfg, double dt) {
  const int g = lattice_width(cfg);
  if (g == 1) return circuit_exp_Ha(cfg, dt);
  Circuit c(g);
  c.append(increment_circuit(g));
  c.append(circuit_exp_Ha(cfg, dt));
  c.append(decrement_circuit(g));
  return c;
}

Circuit circuit_exp_Hv(const LatticeConfig& cfg, double dt) {
  return diagonal_exponential(lattice_width(cfg), pauli_terms_Hv(cfg), dt);
}

Circuit circuit_exp_H1(const LatticeConfig& cfg, double dt) {
  return diagonal_exponential(lattice_width(cfg), pauli_terms_H1(cfg), dt);
}

Circuit circuit_exp_H2(const LatticeConfig& cfg, double dt) {
  const int g = lattice_width(cfg);
  const double theta = -static_cast<double>(cfg.N) * cfg.V0 * dt / cfg.L;
  Circuit c(g);
  for (int q = 0; q < g; ++q) c.add(h(q));
  for (int q = 0; q < g; ++q) c.add(x(q));
  if (g == 1) {
    c.add(phase(0, theta));
  } else {
    std::vector<int> controls;
    for (int q = 0; q + 1 < g; ++q) controls.push_back(q);
    c.add(cphase(controls, g - 1, theta));
  }
  for (int q = 0; q < g; ++q) c.add(x(q));
  for (int q = 0; q < g; ++q) c.add(h(q));
  return c;
}

Circuit trotter_evolution(const LatticeConfig& cfg, Basis basis, double t, int steps) {
  const int g = lattice_width(cfg);
  if (steps < 1) throw ConfigError("trotter_evolution: steps must be >= 1");
  if (!std::isfinite(t)) throw ConfigError("trotter_evolution: non-finite time");
  const double dt = t / steps;
  Circuit step(g);
  if (basis == Basis::coordinate) {
    require_split(cfg);
    if (g == 1) {
      const double a = cfg.spacing();
      step.add(global_phase(-(1.0 / (cfg.m * a * a) + cfg.V0 / (2 * a)) * dt));
      step.add(rx(0, -2 * dt / (cfg.m * a * a)));
    } else {
      step.append(circuit_exp_Hv(cfg, dt));
      step.append(circuit_exp_Hb(cfg, dt));
      step.append(circuit_exp_Ha(cfg, dt));
    }
  } else if (basis == Basis::momentum) {
    step.append(circuit_exp_H2(cfg, dt));
    step.append(circuit_exp_H1(cfg, dt));
  } else {
    throw ConfigError("trotter_evolution: basis must be coordinate or momentum");
  }
  Circuit c(g);
  for (int k = 0; k < steps; ++k) c.append(step);
  return c;
}

int two_qubit_gate_count(const Circuit& c) {
  int count = 0;
  for (const auto& g : c.gates()) {
    const auto q = static_cast<int>(g.support().size());
    if (q >= 2) count += q - 1;
  }
  return count;
}

// ---------------------------------------------------------------------------

Circuit hadamard_test_circuit(const Circuit& u, Index alpha, Part part) {
  const int g = u.width();
  const int anc = g;
  if (alpha < 0 || alpha >= (Index{1} << g)) throw ConfigError("hadamard_test: alpha out of range");
  Circuit c(g + 1);
  for (int q = 0; q < g; ++q) {
    if ((alpha >> q) & 1) c.add(x(q));
  }
  c.add(h(anc));
  if (part == Part::im) c.add(s(anc));
  c.append(u.controlled(anc));
  c.add(h(anc));
  return c;
}

double hadamard_value(double p0, double p1, Part part) {
  return part == Part::re ? p0 - p1 : p1 - p0;
}

HadamardEstimate hadamard_test(const Circuit& u, Index alpha, Part part,
                               std::optional<std::uint64_t> shots, std::mt19937_64* rng) {
  const Circuit c = hadamard_test_circuit(u, alpha, part);
  const VectorXc psi = simulate(c);
  const Index anc_bit = Index{1} << u.width();
  double p1 = 0;
  for (Index i = 0; i < psi.size(); ++i) {
    if (i & anc_bit) p1 += std::norm(psi(i));
  }
  p1 = std::clamp(p1, 0.0, 1.0);
  HadamardEstimate e;
  if (!shots) {
    e.p1 = p1;
    e.p0 = 1 - p1;
    e.value = hadamard_value(e.p0, e.p1, part);
    return e;
  }
  if (*shots == 0) throw ConfigError("hadamard_test: shots must be > 0");
  if (rng == nullptr) throw ConfigError("hadamard_test: shot mode needs a random stream");
  std::binomial_distribution<std::uint64_t> draw(*shots, p1);
  const double n = static_cast<double>(*shots);
  e.p1 = static_cast<double>(draw(*rng)) / n;
  e.p0 = 1 - e.p1;
  e.value = hadamard_value(e.p0, e.p1, part);
  e.stderr_ = 2 * std::sqrt(e.p1 * e.p0 / n);
  return e;
}

TraceEstimate icf_trace_estimate(const LatticeConfig& cfg, Basis basis, double t, int steps,
                                 std::optional<std::uint64_t> shots, std::uint64_t seed) {
  const Circuit u = trotter_evolution(cfg, basis, t, steps);
  TraceEstimate out;
  double var_re = 0, var_im = 0;
  for (Index alpha = 0; alpha < cfg.N; ++alpha) {
    for (Part part : {Part::re, Part::im}) {
      std::seed_seq seq{seed, static_cast<std::uint64_t>(alpha),
                        static_cast<std::uint64_t>(part == Part::re ? 0 : 1)};
      std::mt19937_64 rng(seq);
      const HadamardEstimate e = hadamard_test(u, alpha, part, shots, &rng);
      if (part == Part::re) {
        out.value += e.value;
        var_re += e.stderr_ * e.stderr_;
      } else {
        out.value += Complex(0, e.value);
        var_im += e.stderr_ * e.stderr_;
      }
    }
  }
  out.stderr_re = std::sqrt(var_re);
  out.stderr_im = std::sqrt(var_im);
  return out;
}

TraceEstimate icf_difference_estimate(const LatticeConfig& cfg, Basis basis, double t, int steps,
                                      std::optional<std::uint64_t> shots, std::uint64_t seed) {
  LatticeConfig free = cfg;
  free.V0 = 0;
  const TraceEstimate c = icf_trace_estimate(cfg, basis, t, steps, shots, seed);
  const TraceEstimate c0 = icf_trace_estimate(free, basis, t, steps, shots, seed ^ 0x9e3779b97f4a7c15ULL);
  TraceEstimate d;
  d.value = c.value - c0.value;
  d.stderr_re = std::hypot(c.stderr_re, c0.stderr_re);
  d.stderr_im = std::hypot(c.stderr_im, c0.stderr_im);
  return d;
}

}  // namespace icf
