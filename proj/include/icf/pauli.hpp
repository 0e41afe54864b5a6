#pragma once

#include <string>
#include <vector>

#include "icf/dense.hpp"

namespace icf {

/// coefficient * P_{G-1} (x) ... (x) P_0. The word is read with qubit G-1
/// leftmost, so word.back() acts on qubit 0.
struct PauliTerm {
  Complex coefficient{0.0, 0.0};
  std::string word;

  int width() const { return static_cast<int>(word.size()); }
  /// Pauli letter acting on qubit q.
  char on(int q) const { return word[word.size() - 1 - static_cast<std::size_t>(q)]; }
};

using PauliSum = std::vector<PauliTerm>;

/// "I...I" of length width with `letter` placed on each qubit in `qubits`.
std::string pauli_word(int width, const std::vector<int>& qubits, char letter);

/// Dense 2^G x 2^G matrix of a single word (coefficient ignored).
MatrixXc pauli_matrix(const std::string& word);

/// Sum of coefficient * word as a dense matrix. Empty sums need `width`.
MatrixXc pauli_dense(const PauliSum& terms, int width = -1);

/// Product of two terms, including the i factors of XY = iZ and friends.
PauliTerm multiply(const PauliTerm& a, const PauliTerm& b);
PauliSum multiply(const PauliSum& a, const PauliSum& b);

/// Merges repeated words (first-seen order) and drops |c| <= tol.
PauliSum simplify(const PauliSum& terms, double tol = 0.0);

/// true when every letter is I or Z.
bool is_diagonal(const PauliTerm& t);

/// U = diag(-N/2 + n) = -1/2 I - sum_b 2^b/2 Z_b.
PauliSum pauli_U(int width);

/// U_phi = diag(n - (N-1)/2) = -sum_b 2^b/2 Z_b. Traceless.
PauliSum pauli_U_phi(int width);

std::string to_string(const PauliTerm& t);

}  // namespace icf
