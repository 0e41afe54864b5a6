#include "icf/pauli.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace icf {

namespace {

void check_word(const std::string& word) {
  if (word.empty()) throw ConfigError("pauli: empty word");
  for (char c : word) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
      throw ConfigError(std::string("pauli: invalid letter '") + c + "' in " + word);
    }
  }
  if (word.size() > 14) throw ConfigError("pauli: word too wide for dense expansion");
}

// Single-qubit product a*b = phase * letter.
std::pair<Complex, char> letter_product(char a, char b) {
  const Complex i{0.0, 1.0};
  if (a == 'I') return {1.0, b};
  if (b == 'I') return {1.0, a};
  if (a == b) return {1.0, 'I'};
  if (a == 'X' && b == 'Y') return {i, 'Z'};
  if (a == 'Y' && b == 'X') return {-i, 'Z'};
  if (a == 'Y' && b == 'Z') return {i, 'X'};
  if (a == 'Z' && b == 'Y') return {-i, 'X'};
  if (a == 'Z' && b == 'X') return {i, 'Y'};
  return {-i, 'Y'};  // X Z
}

}  // namespace

std::string pauli_word(int width, const std::vector<int>& qubits, char letter) {
  if (width < 1) throw ConfigError("pauli_word: width must be >= 1");
  std::string w(static_cast<std::size_t>(width), 'I');
  for (int q : qubits) {
    if (q < 0 || q >= width) throw ConfigError("pauli_word: qubit out of range");
    w[static_cast<std::size_t>(width - 1 - q)] = letter;
  }
  return w;
}

MatrixXc pauli_matrix(const std::string& word) {
  check_word(word);
  const int g = static_cast<int>(word.size());
  const Index dim = Index{1} << g;
  MatrixXc m = MatrixXc::Zero(dim, dim);
  // Each column has exactly one nonzero: flip X/Y bits, phase from Y/Z.
  Index flip = 0;
  for (int q = 0; q < g; ++q) {
    const char c = word[static_cast<std::size_t>(g - 1 - q)];
    if (c == 'X' || c == 'Y') flip |= Index{1} << q;
  }
  for (Index col = 0; col < dim; ++col) {
    Complex phase = 1.0;
    for (int q = 0; q < g; ++q) {
      const char c = word[static_cast<std::size_t>(g - 1 - q)];
      const bool bit = (col >> q) & 1;
      if (c == 'Z' && bit) phase = -phase;
      if (c == 'Y') phase *= bit ? Complex(0, -1) : Complex(0, 1);
    }
    m(col ^ flip, col) = phase;
  }
  return m;
}

MatrixXc pauli_dense(const PauliSum& terms, int width) {
  if (terms.empty()) {
    if (width < 1) throw ConfigError("pauli_dense: empty sum needs an explicit width");
    const Index dim = Index{1} << width;
    return MatrixXc::Zero(dim, dim);
  }
  const int g = terms.front().width();
  if (width >= 1 && width != g) throw ConfigError("pauli_dense: width mismatch");
  const Index dim = Index{1} << g;
  MatrixXc m = MatrixXc::Zero(dim, dim);
  for (const auto& t : terms) {
    if (t.width() != g) throw ConfigError("pauli_dense: mixed word widths");
    m += t.coefficient * pauli_matrix(t.word);
  }
  return m;
}

PauliTerm multiply(const PauliTerm& a, const PauliTerm& b) {
  if (a.word.size() != b.word.size()) throw ConfigError("pauli multiply: width mismatch");
  PauliTerm out;
  out.coefficient = a.coefficient * b.coefficient;
  out.word.resize(a.word.size());
  for (std::size_t k = 0; k < a.word.size(); ++k) {
    const auto [phase, letter] = letter_product(a.word[k], b.word[k]);
    out.coefficient *= phase;
    out.word[k] = letter;
  }
  return out;
}

PauliSum multiply(const PauliSum& a, const PauliSum& b) {
  PauliSum out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(multiply(x, y));
  return simplify(out);
}

PauliSum simplify(const PauliSum& terms, double tol) {
  std::map<std::string, std::size_t> index;
  PauliSum out;
  for (const auto& t : terms) {
    auto [it, inserted] = index.emplace(t.word, out.size());
    if (inserted) {
      out.push_back(t);
    } else {
      out[it->second].coefficient += t.coefficient;
    }
  }
  PauliSum kept;
  for (auto& t : out) {
    if (std::abs(t.coefficient) > tol) kept.push_back(std::move(t));
  }
  return kept;
}

bool is_diagonal(const PauliTerm& t) {
  for (char c : t.word) {
    if (c != 'I' && c != 'Z') return false;
  }
  return true;
}

PauliSum pauli_U(int width) {
  PauliSum s{{-0.5, pauli_word(width, {}, 'I')}};
  for (const auto& t : pauli_U_phi(width)) s.push_back(t);
  return s;
}

PauliSum pauli_U_phi(int width) {
  if (width < 1) throw ConfigError("pauli_U_phi: width must be >= 1");
  PauliSum s;
  for (int b = 0; b < width; ++b) {
    s.push_back({-std::ldexp(1.0, b) / 2, pauli_word(width, {b}, 'Z')});
  }
  return s;
}

std::string to_string(const PauliTerm& t) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << t.coefficient.real() << (t.coefficient.imag() < 0 ? "" : "+") << t.coefficient.imag()
     << "i) " << t.word;
  return os.str();
}

}  // namespace icf
