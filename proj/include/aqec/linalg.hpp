#pragma once

// Dense Hermitian linear algebra used throughout: a cyclic Jacobi eigensolver,
// trace/operator norms and a few Kronecker helpers. Everything here is templated on
// the Eigen expression so real and complex inputs share one code path.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/SVD>

#include "aqec/types.hpp"

namespace aqec {

inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;

template <typename Scalar>
struct HermitianEigen {
  RVector eigenvalues;  // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors;  // columns
  int sweeps = 0;
  bool converged = false;
};

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

/// Cyclic Jacobi diagonalization of a Hermitian (or real symmetric) matrix.
///
/// Each rotation first removes the phase of the pivot a_pq, then applies the classical
/// real rotation that annihilates it. Sweeps stop once the off-diagonal Frobenius norm
/// drops below tol * max(1, ||A||_F), or after max_sweeps.
template <typename Derived>
HermitianEigen<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& input,
                                                      bool compute_vectors = true,
                                                      double tol = kJacobiTolerance,
                                                      int max_sweeps = kJacobiMaxSweeps) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (input.rows() != input.cols()) throw std::invalid_argument("jacobi_eigen: matrix is not square");

  const Eigen::Index n = input.rows();
  Mat a = input;
  // Symmetrize away rounding noise; callers are expected to have checked hermiticity.
  a = (a + a.adjoint().eval()) * 0.5;
  Mat v;
  if (compute_vectors) v = Mat::Identity(n, n);

  const double scale = a.norm();
  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  HermitianEigen<Scalar> out;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= tol * scale) {
      out.converged = true;
      break;
    }
    ++out.sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq_abs = std::abs(a(p, q));
        if (apq_abs < 1e-300) continue;
        const Scalar phase = a(p, q) / apq_abs;
        const double app = std::real(a(p, p));
        const double aqq = std::real(a(q, q));
        const double theta = (aqq - app) / (2.0 * apq_abs);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // G = diag(1, conj(phase)) * [[c, s], [-s, c]] acting on the (p, q) plane.
        const Scalar gpp = Scalar(c);
        const Scalar gpq = Scalar(s);
        const Scalar gqp = -Scalar(s) * Eigen::numext::conj(phase);
        const Scalar gqq = Scalar(c) * Eigen::numext::conj(phase);

        for (Eigen::Index k = 0; k < n; ++k) {  // A <- A G
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {  // A <- G^H A
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = Eigen::numext::conj(gpp) * apk + Eigen::numext::conj(gqp) * aqk;
          a(q, k) = Eigen::numext::conj(gpq) * apk + Eigen::numext::conj(gqq) * aqk;
        }
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        if (compute_vectors) {
          for (Eigen::Index k = 0; k < n; ++k) {
            const Scalar vkp = v(k, p);
            const Scalar vkq = v(k, q);
            v(k, p) = vkp * gpp + vkq * gqp;
            v(k, q) = vkp * gpq + vkq * gqq;
          }
        }
      }
    }
  }
  if (!out.converged && off_norm() <= tol * scale) out.converged = true;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return std::real(a(x, x)) < std::real(a(y, y)); });
  out.eigenvalues.resize(n);
  if (compute_vectors) out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.eigenvalues(i) = std::real(a(src, src));
    if (compute_vectors) out.eigenvectors.col(i) = v.col(src);
  }
  return out;
}

template <typename Derived>
RVector hermitian_eigenvalues(const Eigen::MatrixBase<Derived>& m) {
  return jacobi_eigen(m, false).eigenvalues;
}

/// Sum of absolute eigenvalues of a Hermitian matrix. Throws std::invalid_argument when
/// the input is not Hermitian to 1e-8.
template <typename Derived>
double trace_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("trace_norm: matrix is not square");
  if (m.size() == 0) return 0.0;
  if (!is_hermitian(m, 1e-8)) throw std::invalid_argument("trace_norm: matrix is not Hermitian");
  return hermitian_eigenvalues(m).cwiseAbs().sum();
}

/// Spectral norm of a Hermitian matrix: max |eigenvalue|.
template <typename Derived>
double hermitian_operator_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  if (!is_hermitian(m, 1e-8)) throw std::invalid_argument("operator norm: matrix is not Hermitian");
  return hermitian_eigenvalues(m).cwiseAbs().maxCoeff();
}

/// Spectral norm of an arbitrary matrix, the largest singular value.
template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(m.eval());
  return svd.singularValues()(0);
}

template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename A::Scalar, typename B::Scalar>::ReturnType;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = 1e-10) {
  if (u.rows() != u.cols()) return false;
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Mat gram = u.adjoint() * u;
  return (gram - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace aqec
