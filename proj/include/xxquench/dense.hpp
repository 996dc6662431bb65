#ifndef XXQUENCH_DENSE_HPP
#define XXQUENCH_DENSE_HPP

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace xxquench {

using cplx = std::complex<double>;

/// Row-major dense matrix with 0-based element access.
template <typename T>
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  T& operator()(std::size_t i, std::size_t j) noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
Matrix<T> operator*(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

/// Fixed-size square matrix for the 2x2 single-site and 4x4 two-spin algebra.
template <typename T, std::size_t N>
struct SquareMatrix {
  std::array<T, N * N> a{};

  static constexpr std::size_t size = N;

  static constexpr SquareMatrix identity() {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = T{1};
    return m;
  }

  constexpr T& operator()(std::size_t i, std::size_t j) noexcept { return a[i * N + j]; }
  constexpr const T& operator()(std::size_t i, std::size_t j) const noexcept {
    return a[i * N + j];
  }

  constexpr T trace() const noexcept {
    T t{};
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  friend constexpr SquareMatrix operator*(const SquareMatrix& x, const SquareMatrix& y) {
    SquareMatrix r;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t j = 0; j < N; ++j) r(i, j) += x(i, k) * y(k, j);
    return r;
  }
  friend constexpr SquareMatrix operator+(SquareMatrix x, const SquareMatrix& y) {
    for (std::size_t i = 0; i < N * N; ++i) x.a[i] += y.a[i];
    return x;
  }
  friend constexpr SquareMatrix operator-(SquareMatrix x, const SquareMatrix& y) {
    for (std::size_t i = 0; i < N * N; ++i) x.a[i] -= y.a[i];
    return x;
  }
  template <typename S>
  friend constexpr SquareMatrix operator*(S s, SquareMatrix x) {
    for (auto& v : x.a) v *= s;
    return x;
  }
  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;
};

using Mat2 = SquareMatrix<double, 2>;
using Mat4c = SquareMatrix<cplx, 4>;

inline Mat4c adjoint(const Mat4c& m) {
  Mat4c r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r(i, j) = std::conj(m(j, i));
  return r;
}

inline double max_abs_diff(const Mat4c& x, const Mat4c& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < 16; ++i) d = std::max(d, std::abs(x.a[i] - y.a[i]));
  return d;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace xxquench

#endif
