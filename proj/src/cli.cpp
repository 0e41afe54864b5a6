#include "icf/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "icf/analytic.hpp"
#include "icf/circuits.hpp"
#include "icf/field.hpp"
#include "icf/lattice.hpp"
#include "icf/noise.hpp"
#include "icf/spectral.hpp"

#ifndef ICF_VERSION
#define ICF_VERSION "0.0.0"
#endif

namespace icf {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;
constexpr const char* kOutputEnv = "PHASESHIFT_OUTPUT_DIR";

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;
  json extra = json::object();
};

// ---------------------------------------------------------------------------
// Shared option groups
// ---------------------------------------------------------------------------

struct LatticeOpts {
  Index N = 0;
  double L = 0;
  double m = 1.0;
  double V0 = 0;
  std::string delta = "split";

  LatticeConfig config() const {
    LatticeConfig c{N, L, m, V0, parse_placement(delta)};
    c.validate();
    return c;
  }
};

void add_lattice(CLI::App* sub, LatticeOpts& o, bool required) {
  auto* n = sub->add_option("--N", o.N, "grid points");
  auto* l = sub->add_option("--L", o.L, "box size");
  sub->add_option("--m", o.m, "particle mass");
  auto* v = sub->add_option("--V0", o.V0, "contact coupling");
  sub->add_option("--delta", o.delta, "delta placement: split|single");
  if (required) {
    n->required();
    l->required();
    v->required();
  }
}

struct EnergyOpts {
  double emin = 0.1;
  double emax = 2.0;
  int esteps = 40;
  std::vector<double> grid() const { return linspace(emin, emax, esteps); }
};

void add_energy(CLI::App* sub, EnergyOpts& o) {
  sub->add_option("--emin", o.emin, "lowest energy");
  sub->add_option("--emax", o.emax, "highest energy");
  sub->add_option("--esteps", o.esteps, "number of energies, endpoints included");
}

Basis parse_basis(const std::string& s) {
  if (s == "coordinate") return Basis::coordinate;
  if (s == "momentum") return Basis::momentum;
  throw ConfigError("basis must be coordinate|momentum, got '" + s + "'");
}

HamiltonianMatrix build(const LatticeConfig& cfg, Basis basis, bool interacting) {
  return basis == Basis::momentum ? build_momentum_hamiltonian(cfg, interacting)
                                  : build_coordinate_hamiltonian(cfg, interacting);
}

// <alpha| exp(-i H t) |alpha> from a dense eigendecomposition.
Complex exact_overlap(const MatrixXc& h, Index alpha, double t) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
  const VectorXc row = es.eigenvectors().row(alpha).transpose();
  Complex sum = 0.0;
  for (Index n = 0; n < row.size(); ++n) {
    sum += std::norm(row(n)) * std::exp(Complex(0, -es.eigenvalues()(n) * t));
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct Command {
  CLI::App* app = nullptr;
  std::function<Table(std::uint64_t seed)> run;
};

Command add_icf_euclidean(CLI::App& root) {
  struct P {
    LatticeOpts lat;
    std::string tau;
    int moment = 0;
    std::string basis = "coordinate";
    Index max_dim = kDefaultMaxDimension;
  };
  auto p = std::make_shared<P>();
  auto* sub = root.add_subcommand("icf-euclidean", "Delta C(tau) in Euclidean time vs the erfc limit");
  add_lattice(sub, p->lat, true);
  sub->add_option("--tau", p->tau, "tau grid start:stop:count")->required();
  sub->add_option("--moment", p->moment, "moment 0, 1 or 2");
  sub->add_option("--basis", p->basis, "coordinate|momentum");
  sub->add_option("--max-dim", p->max_dim, "eigen-solver size cap");
  return {sub, [p](std::uint64_t) {
            const LatticeConfig cfg = p->lat.config();
            const Basis basis = parse_basis(p->basis);
            const Spectrum si = eigen_spectrum(build(cfg, basis, true), p->max_dim);
            const Spectrum s0 = eigen_spectrum(build(cfg, basis, false), p->max_dim);
            const auto grid = parse_grid(p->tau);
            const auto series = difference_series(si, s0, grid, TimeKind::euclidean, p->moment);
            Table t;
            if (p->moment == 0) {
              t.columns = {"tau[time]", "dC[1]", "limit[1]", "abs_err[1]"};
            } else {
              t.columns = {"tau[time]", "dC_moment[energy^" + std::to_string(p->moment) + "]"};
            }
            const ScatteringParams sp{cfg.m, cfg.V0};
            for (std::size_t i = 0; i < grid.size(); ++i) {
              const double v = series.values[i].real();
              if (p->moment == 0) {
                const double lim = icf_infinite_limit(grid[i], TimeKind::euclidean, sp).real();
                t.rows.push_back({num(grid[i]), num(v), num(lim), num(std::abs(v - lim))});
              } else {
                t.rows.push_back({num(grid[i]), num(v)});
              }
            }
            return t;
          }};
}

Command add_icf_realtime(CLI::App& root) {
  struct P {
    LatticeOpts lat;
    std::string t;
    double window = 0;
    std::string basis = "coordinate";
    Index max_dim = kDefaultMaxDimension;
  };
  auto p = std::make_shared<P>();
  auto* sub = root.add_subcommand("icf-realtime", "Delta C(t) in real time, raw and window-averaged");
  add_lattice(sub, p->lat, true);
  sub->add_option("--t", p->t, "time grid start:stop:count")->required();
  sub->add_option("--window", p->window, "averaging window; 0 = one free-level period 2 pi / eps_1");
  sub->add_option("--basis", p->basis, "coordinate|momentum");
  sub->add_option("--max-dim", p->max_dim, "eigen-solver size cap");
  return {sub, [p](std::uint64_t) {
            const LatticeConfig cfg = p->lat.config();
            const Basis basis = parse_basis(p->basis);
            const Spectrum si = eigen_spectrum(build(cfg, basis, true), p->max_dim);
            const Spectrum s0 = eigen_spectrum(build(cfg, basis, false), p->max_dim);
            const double e1 = std::pow(2 * std::numbers::pi / cfg.L, 2) / (2 * cfg.m);
            const double w = p->window > 0 ? p->window : 2 * std::numbers::pi / e1;
            const ScatteringParams sp{cfg.m, cfg.V0};
            Table t;
            t.columns = {"t[time]", "dC_re[1]", "dC_im[1]", "avg_re[1]", "avg_im[1]", "limit_re[1]", "limit_im[1]"};
            t.notes.push_back("window = " + num(w));
            t.extra["window"] = w;
            for (double time : parse_grid(p->t)) {
              const Complex d = icf(si, time, TimeKind::real) - icf(s0, time, TimeKind::real);
              const Complex avg = icf_window_average(si, time, w) - icf_window_average(s0, time, w);
              const Complex lim = icf_infinite_limit(time, TimeKind::real, sp);
              t.rows.push_back({num(time), num(d.real()), num(d.imag()), num(avg.real()), num(avg.imag()),
                                num(lim.real()), num(lim.imag())});
            }
            return t;
          }};
}

struct ScanOpts {
  LatticeOpts lat;
  EnergyOpts energy;
  double eps = 0.1;
  std::string basis = "coordinate";
  Index max_dim = kDefaultMaxDimension;
};

void add_scan(CLI::App* sub, ScanOpts& o, bool with_eps) {
  add_lattice(sub, o.lat, true);
  add_energy(sub, o.energy);
  if (with_eps) {
    sub->add_option("--eps", o.eps, "imaginary part of the energy");
    sub->add_option("--basis", o.basis, "coordinate|momentum");
  }
  sub->add_option("--max-dim", o.max_dim, "eigen-solver size cap");
}

ResolventScan run_scan(const ScanOpts& o, Prescription kind, Table& t) {
  PrescriptionSpec ps;
  ps.kind = kind;
  ps.eps = o.eps;
  ps.basis = kind == Prescription::iL ? Basis::coordinate : parse_basis(o.basis);
  ResolventScan scan = scan_prescription(o.lat.config(), ps, o.energy.grid(), o.max_dim);
  for (const auto& w : scan.warnings) {
    t.notes.push_back("warning: " + w);
    std::cerr << "warning: " << w << "\n";
  }
  t.extra["warnings"] = scan.warnings;
  return scan;
}

Command add_resolvent_eps(CLI::App& root) {
  auto p = std::make_shared<ScanOpts>();
  auto* sub = root.add_subcommand("resolvent-eps", "(E+i eps) Delta C-tilde vs the Krein form");
  add_scan(sub, *p, true);
  return {sub, [p](std::uint64_t) {
            Table t;
            const ResolventScan scan = run_scan(*p, Prescription::e_plus_ieps, t);
            const double L = scan.config.L, m = scan.config.m;
            t.columns = {"E[energy]", "zdC_re[1]", "zdC_im[1]", "krein_re[1]", "krein_im[1]",
                         "free_over_L_re[1/(energy*length)]", "free_over_L_im[1/(energy*length)]",
                         "box_re[1/(energy*length)]", "box_im[1/(energy*length)]"};
            for (const auto& r : scan.rows) {
              const Complex fl = r.free_trace / L;
              const Complex box = free_resolvent(r.z, L, ResolventMode::box, m);
              t.rows.push_back({num(r.E), num(r.z_dC.real()), num(r.z_dC.imag()), num(r.krein.real()),
                                num(r.krein.imag()), num(fl.real()), num(fl.imag()), num(box.real()),
                                num(box.imag())});
            }
            return t;
          }};
}

Table phase_table(const ResolventScan& scan, Table t) {
  t.columns = {"E[energy]", "cot_phi[1]", "cot_delta[1]", "rel_err[1]", "dC_re[1/energy]", "dC_im[1/energy]"};
  for (const auto& r : scan.rows) {
    t.rows.push_back({num(r.E), num(r.cot_phi), num(r.cot_delta), num(r.rel_err), num(r.dC.real()),
                      num(r.dC.imag())});
  }
  return t;
}

Command add_phase_eps(CLI::App& root) {
  auto p = std::make_shared<ScanOpts>();
  auto* sub = root.add_subcommand("phase-eps", "cot phi from the E+i eps prescription");
  add_scan(sub, *p, true);
  return {sub, [p](std::uint64_t) {
            Table t;
            const ResolventScan scan = run_scan(*p, Prescription::e_plus_ieps, t);
            return phase_table(scan, std::move(t));
          }};
}

Command add_phase_il(CLI::App& root) {
  auto p = std::make_shared<ScanOpts>();
  auto* sub = root.add_subcommand("phase-il", "cot phi from the L -> iL rotated Hamiltonian");
  add_scan(sub, *p, false);
  return {sub, [p](std::uint64_t) {
            Table t;
            const ResolventScan scan = run_scan(*p, Prescription::iL, t);
            return phase_table(scan, std::move(t));
          }};
}

struct QsimOpts {
  double L = 4;
  double m = 1;
  double V0 = 2;
  double dt = 0.04;
  std::string t = "0.04:2:50";
  std::uint64_t shots = 1000;
  std::string basis = "coordinate";
};

void add_qsim(CLI::App* sub, QsimOpts& o) {
  sub->add_option("--L", o.L, "box size");
  sub->add_option("--m", o.m, "particle mass");
  sub->add_option("--V0", o.V0, "contact coupling");
  sub->add_option("--dt", o.dt, "Trotter step");
  sub->add_option("--t", o.t, "time grid start:stop:count, multiples of dt");
  sub->add_option("--shots", o.shots, "measurements per Hadamard test; 0 = exact");
  sub->add_option("--basis", o.basis, "coordinate|momentum");
}

int steps_for(double t, double dt) {
  if (!(dt > 0)) throw ConfigError("dt must be > 0");
  return std::max(1, static_cast<int>(std::lround(t / dt)));
}

Command add_qsim_single(CLI::App& root) {
  auto p = std::make_shared<QsimOpts>();
  auto* sub = root.add_subcommand("qsim-single", "single-qubit Hadamard-test Delta C(t)");
  add_qsim(sub, *p);
  return {sub, [p](std::uint64_t seed) {
            const LatticeConfig cfg{2, p->L, p->m, p->V0, DeltaPlacement::split_pair};
            cfg.validate();
            const Basis basis = parse_basis(p->basis);
            const Spectrum si = eigen_spectrum(build(cfg, basis, true));
            const Spectrum s0 = eigen_spectrum(build(cfg, basis, false));
            Table t;
            t.columns = {"t[time]", "exact_re[1]", "exact_im[1]", "circuit_re[1]", "circuit_im[1]",
                         "est_re[1]", "est_im[1]", "stderr_re[1]", "stderr_im[1]"};
            std::uint64_t k = 0;
            for (double time : parse_grid(p->t)) {
              const int steps = steps_for(time, p->dt);
              const Complex ex = icf(si, time, TimeKind::real) - icf(s0, time, TimeKind::real);
              const TraceEstimate c = icf_difference_estimate(cfg, basis, time, steps);
              const TraceEstimate e = p->shots ? icf_difference_estimate(cfg, basis, time, steps, p->shots, seed + k) : c;
              ++k;
              t.rows.push_back({num(time), num(ex.real()), num(ex.imag()), num(c.value.real()),
                                num(c.value.imag()), num(e.value.real()), num(e.value.imag()),
                                num(e.stderr_re), num(e.stderr_im)});
            }
            return t;
          }};
}

Command add_qsim_two(CLI::App& root) {
  struct P {
    QsimOpts q;
    Index N = 4;
    Index alpha = 0;
  };
  auto p = std::make_shared<P>();
  auto* sub = root.add_subcommand("qsim-two", "Trotterized <alpha|exp(-iHt)|alpha> on log2(N) qubits");
  add_qsim(sub, p->q);
  sub->add_option("--N", p->N, "grid points, a power of two");
  sub->add_option("--alpha", p->alpha, "basis state");
  return {sub, [p](std::uint64_t seed) {
            const LatticeConfig cfg{p->N, p->q.L, p->q.m, p->q.V0, DeltaPlacement::split_pair};
            cfg.validate();
            exact_log2(cfg.N);
            if (p->alpha < 0 || p->alpha >= cfg.N) throw ConfigError("alpha must lie in [0, N)");
            const Basis basis = parse_basis(p->q.basis);
            const MatrixXc h = build(cfg, basis, true).entries;
            Table t;
            t.columns = {"t[time]", "exact_re[1]", "exact_im[1]", "circuit_re[1]", "circuit_im[1]",
                         "est_re[1]", "est_im[1]", "stderr_re[1]", "stderr_im[1]"};
            std::uint64_t k = 0;
            for (double time : parse_grid(p->q.t)) {
              const Complex ex = exact_overlap(h, p->alpha, time);
              const Circuit u = trotter_evolution(cfg, basis, time, steps_for(time, p->q.dt));
              const double cre = hadamard_test(u, p->alpha, Part::re).value;
              const double cim = hadamard_test(u, p->alpha, Part::im).value;
              double ere = cre, eim = cim, sre = 0, sim = 0;
              if (p->q.shots) {
                std::mt19937_64 rng(seed + k);
                const auto r = hadamard_test(u, p->alpha, Part::re, p->q.shots, &rng);
                const auto i = hadamard_test(u, p->alpha, Part::im, p->q.shots, &rng);
                ere = r.value;
                eim = i.value;
                sre = r.stderr_;
                sim = i.stderr_;
              }
              ++k;
              t.rows.push_back({num(time), num(ex.real()), num(ex.imag()), num(cre), num(cim), num(ere),
                                num(eim), num(sre), num(sim)});
            }
            return t;
          }};
}

Command add_noise_sweep(CLI::App& root) {
  struct P {
    QsimOpts q;
    Index N = 4;
    Index alpha = 0;
    std::string part = "re";
    std::string channel = "two";
    std::string preset;
    int reps = 100;
    NoiseModel custom;
  };
  auto p = std::make_shared<P>();
  p->q.t = "0.04:2:50";
  auto* sub = root.add_subcommand("noise-sweep", "density-matrix noise study of the Hadamard test");
  add_qsim(sub, p->q);
  sub->add_option("--N", p->N, "grid points, a power of two");
  sub->add_option("--alpha", p->alpha, "basis state");
  sub->add_option("--part", p->part, "re|im");
  sub->add_option("--channel", p->channel, "readout|single|two|thermal|median|custom");
  sub->add_option("--preset", p->preset, "heron-median|eagle-median|ideal; overrides --channel");
  sub->add_option("--reps", p->reps, "repetitions per point");
  sub->add_option("--readout-p", p->custom.readout_p, "custom: readout flip probability");
  sub->add_option("--depol1", p->custom.depol1, "custom: single-qubit depolarizing probability");
  sub->add_option("--depol2", p->custom.depol2, "custom: two-qubit depolarizing probability");
  sub->add_option("--T1", p->custom.T1, "custom: T1 [us]; thermal noise is on when T1 or T2 is given");
  sub->add_option("--T2", p->custom.T2, "custom: T2 [us]");
  sub->add_option("--dur1", p->custom.dur1, "custom: single-qubit gate length [ns]");
  sub->add_option("--dur2", p->custom.dur2, "custom: two-qubit gate length [ns]");
  return {sub, [p, sub](std::uint64_t seed) {
            Experiment exp;
            exp.cfg = LatticeConfig{p->N, p->q.L, p->q.m, p->q.V0, DeltaPlacement::split_pair};
            exp.cfg.validate();
            exact_log2(exp.cfg.N);
            exp.basis = parse_basis(p->q.basis);
            exp.dt = p->q.dt;
            exp.times = parse_grid(p->q.t);
            exp.alpha = p->alpha;
            if (p->part != "re" && p->part != "im") throw ConfigError("part must be re|im");
            exp.part = p->part == "re" ? Part::re : Part::im;
            std::vector<NoiseModel> grid;
            if (!p->preset.empty()) {
              grid.push_back(noise_preset(p->preset));
            } else if (p->channel == "custom") {
              NoiseModel n = p->custom;
              n.name = "custom";
              n.thermal = sub->count("--T1") > 0 || sub->count("--T2") > 0;
              grid.push_back(n);
            } else {
              grid = default_sweep(p->channel);
            }
            const auto summaries = run_noise_sweep(exp, grid, p->reps, p->q.shots, seed);
            Table t;
            t.columns = {"model", "t[time]", "ideal[1]", "exact_noisy[1]", "mean[1]", "sd[1]",
                         "lower[1]", "upper[1]", "two_qubit_gates[count]"};
            for (const auto& s : summaries) {
              for (std::size_t i = 0; i < s.times.size(); ++i) {
                t.rows.push_back({"\"" + s.noise.name + "\"", num(s.times[i]), num(s.ideal[i]),
                                  num(s.exact_noisy[i]), num(s.mean[i]), num(s.sd[i]), num(s.lower[i]),
                                  num(s.upper[i]), std::to_string(s.two_qubit_gates[i])});
              }
            }
            return t;
          }};
}

Command add_field_spectrum(CLI::App& root) {
  struct P {
    FieldLatticeConfig f;
    double spacing = 0;
    double phi_max = 0;
    Index levels = 8;
  };
  auto p = std::make_shared<P>();
  p->f.Nphi = 64;
  auto* sub = root.add_subcommand("field-spectrum", "low levels of the discretized phi^4 Hamiltonian");
  sub->add_option("--Nx", p->f.Nx, "spatial sites");
  sub->add_option("--L", p->f.L, "spatial box");
  sub->add_option("--spacing", p->spacing, "spatial spacing a; required for Nx = 1");
  sub->add_option("--m", p->f.m, "field mass");
  sub->add_option("--lambda", p->f.lambda, "quartic coupling");
  sub->add_option("--Nphi", p->f.Nphi, "field values per site, a power of two");
  sub->add_option("--phi-max", p->phi_max, "field range; 0 = 12 / sqrt(m)");
  sub->add_option("--levels", p->levels, "number of levels to report");
  return {sub, [p](std::uint64_t) {
            FieldLatticeConfig f = p->f;
            if (p->spacing > 0) f.spacing_override = p->spacing;
            if (p->phi_max > 0) {
              f.phi_max = p->phi_max;
            } else {
              if (!(f.m > 0)) throw ConfigError("phi-max must be given when m = 0");
              f.phi_max = 12 / std::sqrt(f.m);
            }
            f.validate();
            const FieldConventionDiff d = compare_field_conventions(f, p->levels);
            Table t;
            t.columns = {"level", "canonical[energy]", "as_printed[energy]"};
            for (Index i = 0; i < d.low_canonical.size(); ++i) {
              t.rows.push_back({std::to_string(i), num(d.low_canonical(i)), num(d.low_as_printed(i))});
            }
            std::istringstream rep(d.report());
            for (std::string line; std::getline(rep, line);) t.notes.push_back(line);
            t.extra["convention_diff"] = {{"max_abs", d.max_abs},
                                          {"hopping", d.hopping},
                                          {"onsite", d.onsite},
                                          {"coupling", d.coupling}};
            t.extra["phi_max"] = f.phi_max;
            return t;
          }};
}

// ---------------------------------------------------------------------------
// Driver
// ---------------------------------------------------------------------------

json option_values(const CLI::App* sub) {
  json params = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (!res.empty()) value = res.back();
    } else {
      value = opt->get_default_str();
    }
    if (!value.empty()) params[opt->get_lnames()[0]] = value;
  }
  return params;
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env) return env;
  return ".";
}

void write_outputs(const fs::path& dir, const std::string& name, const json& params, std::uint64_t seed,
                   const Table& t, double runtime) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  const fs::path csv = dir / (name + ".csv");
  const fs::path man = dir / (name + ".json");
  {
    std::ofstream os(csv);
    if (!os) throw ConfigError("cannot write " + csv.string());
    os << "# icf " << tool_version() << " " << name << "\n";
    for (const auto& [k, v] : params.items()) os << "# " << k << " = " << v.get<std::string>() << "\n";
    os << "# seed = " << seed << "\n";
    for (const auto& n : t.notes) os << "# " << n << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
  }
  json m = {{"schema_version", kSchemaVersion},
            {"tool", "icf"},
            {"tool_version", tool_version()},
            {"subcommand", name},
            {"parameters", params},
            {"seed", seed},
            {"runtime_seconds", runtime},
            {"outputs", {csv.filename().string()}},
            {"warnings", t.extra.contains("warnings") ? t.extra["warnings"] : json::array()},
            {"columns", t.columns},
            {"extra", t.extra}};
  std::ofstream os(man);
  if (!os) throw ConfigError("cannot write " + man.string());
  os << m.dump(2) << "\n";
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

// Splices config-file entries in front of the command-line flags so that
// later (command-line) occurrences win.
std::vector<std::string> splice_config(std::vector<std::string> args, const std::vector<std::string>& subs) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto kv = read_config_file(path);
  std::size_t at = args.size();
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (std::find(subs.begin(), subs.end(), args[i]) != subs.end()) {
      at = i + 1;
      break;
    }
  }
  std::vector<std::string> extra;
  for (const auto& [k, v] : kv) {
    if (k == "config") continue;
    extra.push_back("--" + k);
    extra.push_back(v);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
  return args;
}

int run_parsed(std::vector<std::string> args);

int replay(const std::string& manifest, const std::string& out, bool seed_given, std::uint64_t seed) {
  std::ifstream is(manifest);
  if (!is) throw ConfigError("cannot open manifest '" + manifest + "'");
  json m;
  try {
    is >> m;
  } catch (const json::exception& e) {
    throw ConfigError("manifest '" + manifest + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("subcommand") || !m.contains("parameters")) {
    throw ConfigError("manifest '" + manifest + "' lacks subcommand or parameters");
  }
  if (m.value("schema_version", 0) > kSchemaVersion) {
    throw ConfigError("manifest schema version is newer than this tool");
  }
  std::vector<std::string> args{"icf", m["subcommand"].get<std::string>()};
  for (const auto& [k, v] : m["parameters"].items()) {
    args.push_back("--" + k);
    args.push_back(v.get<std::string>());
  }
  args.push_back("--seed");
  args.push_back(std::to_string(seed_given ? seed : m.value("seed", std::uint64_t{0})));
  if (!out.empty()) {
    args.push_back("--out");
    args.push_back(out);
  }
  return run_parsed(args);
}

int run_parsed(std::vector<std::string> args) {
  CLI::App app{"Integrated correlation functions, phase shifts and their circuit simulation", "icf"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string out;
  std::string config;
  std::uint64_t seed = 12345;
  app.add_option("--out", out, "output directory (default $" + std::string(kOutputEnv) + " or .)");
  app.add_option("--config", config, "key = value file; flags override it");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.set_version_flag("--version", tool_version());

  std::vector<Command> commands{add_icf_euclidean(app), add_icf_realtime(app), add_resolvent_eps(app),
                                add_phase_eps(app),     add_phase_il(app),     add_qsim_single(app),
                                add_qsim_two(app),      add_noise_sweep(app),  add_field_spectrum(app)};
  std::string manifest;
  auto* rep = app.add_subcommand("replay", "re-run from a JSON manifest");
  rep->add_option("manifest", manifest, "manifest path")->required();
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> names;
  for (const auto& c : commands) names.push_back(c.app->get_name());
  names.push_back("replay");
  args = splice_config(std::move(args), names);

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  if (rep->parsed()) return replay(manifest, out, seed_opt->count() > 0, seed);
  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const Table t = c.run(seed);
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(output_dir(out), c.app->get_name(), option_values(c.app), seed, t, runtime);
    std::cout << "wrote " << (output_dir(out) / (c.app->get_name() + ".csv")).string() << " (" << t.rows.size()
              << " rows, " << runtime << " s)\n";
    return exit_ok;
  }
  return exit_config;
}

}  // namespace

std::string tool_version() { return ICF_VERSION; }

std::vector<double> parse_grid(const std::string& spec) {
  auto to_double = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(trim(s), &used);
      if (used != trim(s).size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("grid '" + spec + "': '" + s + "' is not a number");
    }
  };
  const auto c1 = spec.find(':');
  if (c1 == std::string::npos) return {to_double(spec)};
  const auto c2 = spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw ConfigError("grid '" + spec + "' must be start:stop:count");
  const double a = to_double(spec.substr(0, c1));
  const double b = to_double(spec.substr(c1 + 1, c2 - c1 - 1));
  const double n = to_double(spec.substr(c2 + 1));
  if (n < 1 || n != std::floor(n) || n > 1e7) throw ConfigError("grid '" + spec + "': bad count");
  if (n > 1 && !(b > a)) throw ConfigError("grid '" + spec + "': stop must exceed start");
  return linspace(a, b, static_cast<int>(n));
}

int run_cli(const std::vector<std::string>& args) {
  try {
    std::vector<std::string> full = args;
    if (full.empty()) full.push_back("icf");
    return run_parsed(full);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args);
}

}  // namespace icf
