#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace icf {

using Complex = std::complex<double>;
using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXc = DenseMatrix<Complex>;
using VectorXc = DenseVector<Complex>;
using MatrixXr = DenseMatrix<double>;
using VectorXr = DenseVector<double>;

/// Invalid user-supplied configuration. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: solver non-convergence, pole proximity, overflow.
/// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return m.cwiseAbs().maxCoeff();
}

/// max |M - M^dagger|
template <typename Derived>
typename Derived::RealScalar hermiticity_defect(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// max |U^dagger U - I|
template <typename Derived>
typename Derived::RealScalar unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  using Plain = typename Derived::PlainObject;
  return (u.adjoint() * u - Plain::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// Largest singular value.
template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m.eval());
  return svd.singularValues()(0);
}

inline bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

/// log2(n) for a power of two; throws ConfigError otherwise.
inline int exact_log2(Index n) {
  if (!is_power_of_two(n)) {
    throw ConfigError("grid count " + std::to_string(n) + " is not a power of two");
  }
  int g = 0;
  while ((Index{1} << g) < n) ++g;
  return g;
}

/// count points from start to stop inclusive. count = 1 gives {start}.
inline std::vector<double> linspace(double start, double stop, int count) {
  if (count < 1) throw ConfigError("linspace: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = start;
    return out;
  }
  const double step = (stop - start) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = start + step * i;
  out.back() = stop;
  return out;
}

}  // namespace icf
