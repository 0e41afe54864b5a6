#include "icf/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace icf {

double FieldLatticeConfig::spacing() const {
  if (spacing_override) return *spacing_override;
  if (Nx < 2) throw ConfigError("field: N_x = 1 needs an explicit spacing");
  return L / static_cast<double>(Nx - 1);
}

Index FieldLatticeConfig::dimension() const {
  Index d = 1;
  for (Index j = 0; j < Nx; ++j) {
    if (d > (Index{1} << 40) / std::max<Index>(Nphi, 1)) return -1;
    d *= Nphi;
  }
  return d;
}

void FieldLatticeConfig::validate(Index max_dim) const {
  if (Nx < 1) throw ConfigError("field: N_x must be >= 1");
  if (Nphi < 2) throw ConfigError("field: N_phi must be >= 2");
  if (!is_power_of_two(Nphi)) throw ConfigError("field: N_phi must be a power of two");
  if (!(m >= 0) || !std::isfinite(m)) throw ConfigError("field: m must be finite and >= 0");
  if (!std::isfinite(lambda)) throw ConfigError("field: lambda must be finite");
  if (!(phi_max > 0) || !std::isfinite(phi_max)) throw ConfigError("field: phi_max must be positive");
  if (spacing_override && !(*spacing_override > 0)) throw ConfigError("field: spacing must be positive");
  if (!spacing_override && !(L > 0)) throw ConfigError("field: L must be positive");
  const double a = spacing();
  if (!std::isfinite(a)) throw ConfigError("field: spacing must be finite");
  const Index d = dimension();
  if (d < 0 || d > max_dim) {
    throw ConfigError("field: dimension N_phi^N_x exceeds the cap " + std::to_string(max_dim));
  }
}

std::string to_string(FieldConvention c) {
  return c == FieldConvention::canonical ? "canonical" : "as_printed";
}

FieldConvention parse_field_convention(const std::string& name) {
  if (name == "canonical") return FieldConvention::canonical;
  if (name == "as_printed" || name == "as-printed") return FieldConvention::as_printed;
  throw ConfigError("unknown field convention '" + name + "' (canonical|as_printed)");
}

PhiOperator build_phi_operator(int gamma_phi, double a_phi) {
  if (gamma_phi < 1) throw ConfigError("phi operator: gamma_phi must be >= 1");
  PhiOperator op;
  op.terms = pauli_U_phi(gamma_phi);
  for (auto& t : op.terms) t.coefficient *= a_phi;
  const Index n = Index{1} << gamma_phi;
  op.diagonal.resize(n);
  for (Index al = 0; al < n; ++al) op.diagonal(al) = a_phi * (static_cast<double>(al) - (n - 1) / 2.0);
  return op;
}

namespace {

VectorXr phi_values(const FieldLatticeConfig& cfg) {
  VectorXr phi(cfg.Nphi);
  const double ap = cfg.field_spacing();
  for (Index al = 0; al < cfg.Nphi; ++al) phi(al) = -cfg.phi_max / 2 + ap * static_cast<double>(al);
  return phi;
}

struct LocalPieces {
  MatrixXr hopping;  // off-diagonal
  VectorXr onsite;   // diagonal
};

LocalPieces local_pieces(const FieldLatticeConfig& cfg, FieldConvention conv) {
  const Index n = cfg.Nphi;
  const double ap = cfg.field_spacing();
  const VectorXr phi = phi_values(cfg);
  const double hop = conv == FieldConvention::canonical ? 1.0 / (2 * ap * ap)
                                                        : 1.0 / (2 * cfg.m * ap * ap);
  LocalPieces p{MatrixXr::Zero(n, n), VectorXr::Zero(n)};
  for (Index al = 0; al < n; ++al) {
    const Index nb = (al + 1) % n;
    p.hopping(al, nb) -= hop;
    p.hopping(nb, al) -= hop;
  }
  const VectorXr phi2 = phi.array().square();
  const VectorXr phi4 = phi2.array().square();
  if (conv == FieldConvention::canonical) {
    p.onsite = VectorXr::Constant(n, 2 * hop) + 0.5 * cfg.m * cfg.m * phi2 + (cfg.lambda / 24) * phi4;
  } else {
    p.onsite = VectorXr::Constant(n, 1.0 / (cfg.m * ap * ap)) +
               0.5 * (cfg.m * cfg.m + 2 / (ap * ap)) * phi2 + (cfg.lambda / 24) * phi4;
  }
  return p;
}

Index digit(Index state, Index site, Index base) {
  for (Index j = 0; j < site; ++j) state /= base;
  return state % base;
}

// Adds `local` acting on `site` of the tensor product.
void embed_local(MatrixXr& h, const MatrixXr& local, Index site, Index base, double scale) {
  Index stride = 1;
  for (Index j = 0; j < site; ++j) stride *= base;
  for (Index col = 0; col < h.cols(); ++col) {
    const Index d = (col / stride) % base;
    const Index rest = col - d * stride;
    for (Index dn = 0; dn < base; ++dn) {
      const double v = local(dn, d);
      if (v != 0) h(rest + dn * stride, col) += scale * v;
    }
  }
}

// Diagonal nearest-neighbour piece, bonds (j, j+1 mod N_x).
VectorXr coupling_diagonal(const FieldLatticeConfig& cfg, FieldConvention conv) {
  const Index dim = cfg.dimension();
  const VectorXr phi = phi_values(cfg);
  const double a = cfg.spacing();
  const double ap = cfg.field_spacing();
  VectorXr out = VectorXr::Zero(dim);
  for (Index st = 0; st < dim; ++st) {
    double sum = 0;
    for (Index j = 0; j < cfg.Nx; ++j) {
      const double pj = phi(digit(st, j, cfg.Nphi));
      const double pn = phi(digit(st, (j + 1) % cfg.Nx, cfg.Nphi));
      sum += conv == FieldConvention::canonical ? a / (2 * a * a) * (pn - pj) * (pn - pj)
                                                : a / (ap * ap) * pn * pj;
    }
    out(st) = sum;
  }
  return out;
}

struct FieldPieces {
  MatrixXr hopping;
  VectorXr onsite;
  VectorXr coupling;
};

FieldPieces field_pieces(const FieldLatticeConfig& cfg, FieldConvention conv) {
  cfg.validate();
  if (conv == FieldConvention::as_printed && !(cfg.m > 0)) {
    throw ConfigError("field: the as_printed convention divides by m; m must be > 0");
  }
  const Index dim = cfg.dimension();
  const double a = cfg.spacing();
  const LocalPieces local = local_pieces(cfg, conv);
  FieldPieces f{MatrixXr::Zero(dim, dim), VectorXr::Zero(dim), coupling_diagonal(cfg, conv)};
  for (Index j = 0; j < cfg.Nx; ++j) {
    embed_local(f.hopping, local.hopping, j, cfg.Nphi, a);
    for (Index st = 0; st < dim; ++st) f.onsite(st) += a * local.onsite(digit(st, j, cfg.Nphi));
  }
  return f;
}

}  // namespace

MatrixXr field_local_hamiltonian(const FieldLatticeConfig& cfg, FieldConvention conv) {
  cfg.validate();
  const LocalPieces p = local_pieces(cfg, conv);
  MatrixXr h = p.hopping;
  h.diagonal() += p.onsite;
  return h;
}

PauliSum field_local_diagonal_terms(const FieldLatticeConfig& cfg, FieldConvention conv) {
  cfg.validate();
  const int g = exact_log2(cfg.Nphi);
  const double ap = cfg.field_spacing();
  const PauliSum u = pauli_U_phi(g);
  const PauliSum u2 = multiply(u, u);
  const PauliSum u4 = multiply(u2, u2);
  const double m2 = cfg.m * cfg.m;
  double c0, c2;
  if (conv == FieldConvention::canonical) {
    c0 = 1.0 / (ap * ap);
    c2 = 0.5 * m2 * ap * ap;
  } else {
    c0 = 1.0 / (cfg.m * ap * ap);
    c2 = 1 + 0.5 * ap * ap * m2;
  }
  const double c4 = std::pow(ap, 4) * cfg.lambda / 24;
  PauliSum out{{c0, pauli_word(g, {}, 'I')}};
  for (auto t : u2) {
    t.coefficient *= c2;
    out.push_back(t);
  }
  for (auto t : u4) {
    t.coefficient *= c4;
    out.push_back(t);
  }
  return simplify(out);
}

HamiltonianMatrix build_field_hamiltonian(const FieldLatticeConfig& cfg, FieldConvention conv) {
  const FieldPieces f = field_pieces(cfg, conv);
  MatrixXr h = f.hopping;
  h.diagonal() += f.onsite + f.coupling;
  return {h.cast<Complex>(), Basis::field, Rotation::none, true};
}

FieldConventionDiff compare_field_conventions(const FieldLatticeConfig& cfg, Index levels) {
  const FieldPieces c = field_pieces(cfg, FieldConvention::canonical);
  const FieldPieces p = field_pieces(cfg, FieldConvention::as_printed);
  FieldConventionDiff d;
  d.hopping = max_abs(c.hopping - p.hopping);
  d.onsite = max_abs(c.onsite - p.onsite);
  d.coupling = max_abs(c.coupling - p.coupling);
  MatrixXr hc = c.hopping, hp = p.hopping;
  hc.diagonal() += c.onsite + c.coupling;
  hp.diagonal() += p.onsite + p.coupling;
  d.max_abs = max_abs(hc - hp);
  const Index k = std::min(levels, cfg.dimension());
  Eigen::SelfAdjointEigenSolver<MatrixXr> ec(hc, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<MatrixXr> ep(hp, Eigen::EigenvaluesOnly);
  d.low_canonical = ec.eigenvalues().head(k);
  d.low_as_printed = ep.eigenvalues().head(k);
  return d;
}

std::string FieldConventionDiff::report() const {
  std::ostringstream os;
  os.precision(10);
  os << "canonical vs as_printed: max |dH| = " << max_abs << "\n"
     << "  hopping  " << hopping << "\n"
     << "  onsite   " << onsite << "\n"
     << "  coupling " << coupling << "\n"
     << "  level  canonical  as_printed\n";
  for (Index i = 0; i < low_canonical.size(); ++i) {
    os << "  " << i << "  " << low_canonical(i) << "  " << low_as_printed(i) << "\n";
  }
  return os.str();
}

}  // namespace icf
