#ifndef XXQUENCH_ENTANGLEMENT_HPP
#define XXQUENCH_ENTANGLEMENT_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dense.hpp"
#include "errors.hpp"
#include "jacobi.hpp"
#include "rdm.hpp"

namespace xxquench {

/// Eigenvalues of rho below this are rejected; those between it and zero
/// are treated as rounding noise and clamped.
inline constexpr double psd_tolerance = 1e-8;

struct EntanglementReport {
  double concurrence = 0.0;
  double fef = 0.0;
  double fidelity = 0.0;
  double time = 0.0;

  /// Entanglement purification is possible iff f > 1/2. Values within
  /// rounding of 1/2 (e.g. a product state at t = 0) do not count.
  static constexpr double distillable_margin = 1e-12;
  bool distillable() const noexcept { return fef > 0.5 + distillable_margin; }
};

namespace detail {

inline std::array<double, 4> checked_spectrum(const Mat4c& rho) {
  std::array<double, 4> ev = hermitian_eigenvalues(rho);
  if (ev[0] < -psd_tolerance)
    throw NumericalError("density matrix is not positive semidefinite (eigenvalue " + std::to_string(ev[0]) + ")");
  return ev;
}

// (sigma^y x sigma^y) in the standard basis: anti-diagonal (-1, 1, 1, -1).
inline Mat4c spin_flip(const Mat4c& rho) {
  static constexpr std::array<double, 4> sign = {-1.0, 1.0, 1.0, -1.0};
  Mat4c out;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) out(i, j) = sign[i] * sign[j] * std::conj(rho(3 - i, 3 - j));
  return out;
}

}  // namespace detail

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), l_i the decreasing square
/// roots of the eigenvalues of rho * rho~. These equal the eigenvalues of the
/// Hermitian matrix sqrt(rho) rho~ sqrt(rho), which is what is diagonalized.
inline double concurrence(const TwoSpinDensityMatrix& rho) {
  detail::checked_spectrum(rho.entries());
  const Mat4c root = hermitian_function(rho.entries(), [](double x) { return std::sqrt(std::max(x, 0.0)); });
  const Mat4c m = root * detail::spin_flip(rho.entries()) * root;
  std::array<double, 4> mu = hermitian_eigenvalues(m);
  std::array<double, 4> lambda{};
  for (std::size_t i = 0; i < 4; ++i) lambda[i] = std::sqrt(std::max(mu[3 - i], 0.0));
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

/// Magic basis as columns:
///   e1 = (|uu> + |dd>)/sqrt2,   e2 = i(|uu> - |dd>)/sqrt2,
///   e3 = i(|ud> + |du>)/sqrt2,  e4 = (|ud> - |du>)/sqrt2.
inline const Mat4c& magic_basis() {
  static const Mat4c basis = [] {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, r};
    Mat4c b;
    b(0, 0) = r;  b(3, 0) = r;
    b(0, 1) = i;  b(3, 1) = -i;
    b(1, 2) = i;  b(2, 2) = i;
    b(1, 3) = r;  b(2, 3) = -r;
    return b;
  }();
  return basis;
}

/// Fully entangled fraction: max <e|rho|e> over maximally entangled |e>.
/// Those are exactly the real unit vectors in the magic basis (up to a
/// phase), so f is the top eigenvalue of Re(B^dag rho B).
inline double fully_entangled_fraction(const TwoSpinDensityMatrix& rho) {
  detail::checked_spectrum(rho.entries());
  const Mat4c& b = magic_basis();
  const Mat4c m = adjoint(b) * rho.entries() * b;
  Matrix<double> re(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) re(i, j) = 0.5 * (m(i, j).real() + m(j, i).real());
  return jacobi_eigen(std::move(re)).values.back();
}

/// Average teleportation fidelity F = (2f + 1)/3.
inline double teleportation_fidelity(double fef) {
  constexpr double slack = 1e-12;
  if (!(fef >= -slack && fef <= 1.0 + slack))
    throw std::out_of_range("teleportation_fidelity: fully entangled fraction " + std::to_string(fef) +
                            " outside [0, 1]");
  return (2.0 * fef + 1.0) / 3.0;
}

inline EntanglementReport measure(const TwoSpinDensityMatrix& rho) {
  EntanglementReport r;
  r.concurrence = concurrence(rho);
  r.fef = fully_entangled_fraction(rho);
  r.fidelity = teleportation_fidelity(r.fef);
  r.time = rho.time();
  return r;
}

/// Concurrence of an X-form state, 2 max(0, |c| - sqrt(a a')).
inline double x_state_concurrence(const BellBlock& blk) {
  return 2.0 * std::max(0.0, std::abs(blk.c) - std::sqrt(std::max(blk.a * blk.a_prime, 0.0)));
}

}  // namespace xxquench

#endif
