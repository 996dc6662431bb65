#ifndef XXQUENCH_JACOBI_HPP
#define XXQUENCH_JACOBI_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dense.hpp"
#include "errors.hpp"

namespace xxquench {

struct JacobiOptions {
  // Convergence when the off-diagonal Frobenius norm drops below
  // tolerance * ||A||_F.
  double tolerance = 1e-13;
  int max_sweeps = 100;
};

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
/// Column m of `vectors` is the eigenvector of `values[m]`.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix<double> vectors;
  int sweeps = 0;
  double off_norm = 0.0;
};

namespace detail {

inline double off_diagonal_norm(const Matrix<double>& a) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.rows(); ++p)
    for (std::size_t q = p + 1; q < a.cols(); ++q) s += 2.0 * a(p, q) * a(p, q);
  return std::sqrt(s);
}

inline double frobenius_norm(const Matrix<double>& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for a dense real symmetric matrix. Only the
/// upper triangle is read. Throws ConvergenceError with the sweep count and
/// the residual off-diagonal norm if `max_sweeps` is exhausted.
inline SymmetricEigen jacobi_eigen(Matrix<double> a, const JacobiOptions& opt = {}) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) a(q, p) = a(p, q);

  Matrix<double> v = Matrix<double>::identity(n);
  const double scale = detail::frobenius_norm(a);
  const double target = opt.tolerance * (scale > 0.0 ? scale : 1.0);

  int sweep = 0;
  double off = detail::off_diagonal_norm(a);
  while (off > target) {
    if (sweep == opt.max_sweeps)
      throw ConvergenceError("jacobi_eigen: no convergence", sweep, off);
    ++sweep;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation in the (p, q) plane chosen so that (R^T A R)_pq = 0,
        // taking the smaller root for stability.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    off = detail::off_diagonal_norm(a);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix<double>(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    out.values[m] = a(order[m], order[m]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, m) = v(k, order[m]);
  }
  out.sweeps = sweep;
  out.off_norm = off;
  return out;
}

// Hermitian N x N problems are solved through the real symmetric embedding
// H = X + iY  ->  [[X, -Y], [Y, X]], whose spectrum is that of H with every
// eigenvalue doubled. The embedding is an algebra homomorphism, so matrix
// functions can be evaluated on the real side and read back.

namespace detail {

template <std::size_t N>
Matrix<double> real_embedding(const SquareMatrix<cplx, N>& h) {
  Matrix<double> r(2 * N, 2 * N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      // Symmetrize so tiny anti-Hermitian noise cannot break the solver.
      const cplx v = 0.5 * (h(i, j) + std::conj(h(j, i)));
      r(i, j) = v.real();
      r(i + N, j + N) = v.real();
      r(i, j + N) = -v.imag();
      r(i + N, j) = v.imag();
    }
  return r;
}

}  // namespace detail

/// Eigenvalues of a Hermitian matrix, ascending.
template <std::size_t N>
std::array<double, N> hermitian_eigenvalues(const SquareMatrix<cplx, N>& h) {
  const SymmetricEigen e = jacobi_eigen(detail::real_embedding(h));
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = 0.5 * (e.values[2 * i] + e.values[2 * i + 1]);
  return out;
}

/// f(H) for Hermitian H, with f applied to each eigenvalue.
template <std::size_t N, typename F>
SquareMatrix<cplx, N> hermitian_function(const SquareMatrix<cplx, N>& h, F&& f) {
  const SymmetricEigen e = jacobi_eigen(detail::real_embedding(h));
  const std::size_t m = 2 * N;
  std::vector<double> fv(m);
  for (std::size_t k = 0; k < m; ++k) fv[k] = f(e.values[k]);
  SquareMatrix<cplx, N> out;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      double re = 0.0;
      double im = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        re += e.vectors(i, k) * fv[k] * e.vectors(j, k);
        im += e.vectors(i + N, k) * fv[k] * e.vectors(j, k);
      }
      out(i, j) = {re, im};
    }
  return out;
}

}  // namespace xxquench

#endif
