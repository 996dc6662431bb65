#ifndef XXQUENCH_PROPAGATOR_HPP
#define XXQUENCH_PROPAGATOR_HPP

// Single-particle transition amplitudes f_{k,l}(t) = [exp(-i A t)]_{k,l}
// of the Jordan-Wigner fermions, A being the real symmetric hopping matrix
// with A_{k,k+1} = J_k. Heisenberg-picture operators evolve as
//   c_k(t) = sum_l f_{k,l}(t) c_l,   c_k^dag(t) = sum_l conj(f_{k,l}(t)) c_l^dag.

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "dense.hpp"
#include "jacobi.hpp"
#include "lattice.hpp"

namespace xxquench {

class Propagator {
public:
  Propagator(Matrix<cplx> amplitudes, double time) : amp_(std::move(amplitudes)), time_(time) {
    if (amp_.rows() != amp_.cols() || amp_.rows() < 2)
      throw std::invalid_argument("Propagator: amplitudes must be a square matrix with N >= 2");
  }

  int n_sites() const noexcept { return static_cast<int>(amp_.rows()); }
  double time() const noexcept { return time_; }

  /// f_{k,l}(t), 1-based.
  cplx operator()(int k, int l) const noexcept {
    return amp_(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(l - 1));
  }

  /// Row k (1-based) as a 0-indexed span over l.
  std::span<const cplx> row(int k) const noexcept { return amp_.row(static_cast<std::size_t>(k - 1)); }

  const Matrix<cplx>& amplitudes() const noexcept { return amp_; }

private:
  Matrix<cplx> amp_;
  double time_;
};

/// Eigendecomposition of the hopping matrix; evaluating f(t) for many times
/// reuses it. Immutable after construction.
class SpectralPropagator {
public:
  /// Closed-form spectrum of the uniform chain:
  /// q_m = pi m / (N+1), eps_m = 2 J cos q_m, modes sqrt(2/(N+1)) sin(q_m k).
  static SpectralPropagator analytic(const ChainSpec& spec) {
    const int n = spec.n_sites();
    const std::size_t nn = static_cast<std::size_t>(n);
    std::vector<double> energies(nn);
    Matrix<double> modes(nn, nn);
    const double norm = std::sqrt(2.0 / (n + 1));
    for (int m = 1; m <= n; ++m) {
      const double q = pi * m / (n + 1);
      energies[static_cast<std::size_t>(m - 1)] = 2.0 * spec.j_scale() * std::cos(q);
      for (int k = 1; k <= n; ++k)
        modes(static_cast<std::size_t>(k - 1), static_cast<std::size_t>(m - 1)) = norm * std::sin(q * k);
    }
    return SpectralPropagator(std::move(energies), std::move(modes));
  }

  /// Numerical eigendecomposition (cyclic Jacobi) for arbitrary bonds.
  static SpectralPropagator numeric(const CouplingProfile& profile, const JacobiOptions& opt = {}) {
    const std::size_t n = static_cast<std::size_t>(profile.n_sites());
    Matrix<double> a(n, n);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      a(k, k + 1) = profile.bonds()[k];
      a(k + 1, k) = profile.bonds()[k];
    }
    SymmetricEigen e = jacobi_eigen(std::move(a), opt);
    return SpectralPropagator(std::move(e.values), std::move(e.vectors));
  }

  /// Analytic spectrum for uniform profiles, Jacobi otherwise.
  static SpectralPropagator for_profile(const CouplingProfile& profile) {
    if (profile.is_uniform() && profile.bonds().front() > 0.0)
      return analytic(ChainSpec(profile.n_sites(), profile.bonds().front()));
    return numeric(profile);
  }

  int n_sites() const noexcept { return static_cast<int>(energies_.size()); }
  std::span<const double> energies() const noexcept { return energies_; }
  const Matrix<double>& modes() const noexcept { return modes_; }

  Propagator at(double t) const {
    const std::size_t n = energies_.size();
    std::vector<cplx> phase(n);
    for (std::size_t m = 0; m < n; ++m) phase[m] = std::polar(1.0, -energies_[m] * t);
    Matrix<cplx> f(n, n);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t l = k; l < n; ++l) {
        cplx s{};
        for (std::size_t m = 0; m < n; ++m) s += (modes_(k, m) * modes_(l, m)) * phase[m];
        f(k, l) = s;
        f(l, k) = s;
      }
    }
    return Propagator(std::move(f), t);
  }

private:
  SpectralPropagator(std::vector<double> energies, Matrix<double> modes)
      : energies_(std::move(energies)), modes_(std::move(modes)) {}

  std::vector<double> energies_;
  Matrix<double> modes_;
};

inline Propagator analytic_propagator(const ChainSpec& spec, double t) {
  return SpectralPropagator::analytic(spec).at(t);
}

inline Propagator numeric_propagator(const CouplingProfile& profile, double t) {
  return SpectralPropagator::numeric(profile).at(t);
}

/// Thread-safe cache of eigendecompositions keyed by coupling profile.
/// Concurrent lookups share a lock; the first request for a profile
/// decomposes it under the exclusive lock.
class PropagatorCache {
public:
  std::shared_ptr<const SpectralPropagator> get(const CouplingProfile& profile) {
    const std::size_t h = profile.hash();
    {
      std::shared_lock lock(mutex_);
      if (auto hit = find(h, profile)) return hit;
    }
    std::unique_lock lock(mutex_);
    if (auto hit = find(h, profile)) return hit;
    auto sp = std::make_shared<const SpectralPropagator>(SpectralPropagator::for_profile(profile));
    entries_.emplace(h, Entry{profile, sp});
    return sp;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

private:
  struct Entry {
    CouplingProfile profile;
    std::shared_ptr<const SpectralPropagator> spectral;
  };

  std::shared_ptr<const SpectralPropagator> find(std::size_t h, const CouplingProfile& p) const {
    auto [lo, hi] = entries_.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (it->second.profile == p) return it->second.spectral;
    return nullptr;
  }

  mutable std::shared_mutex mutex_;
  std::multimap<std::size_t, Entry> entries_;
};

/// |f_{k,l}(t)|^2 for l = 1..N: where a fermion starting on site k is found.
inline std::vector<double> walk_distribution(const Propagator& prop, int k) {
  if (k < 1 || k > prop.n_sites())
    throw std::out_of_range("walk_distribution: site " + std::to_string(k) + " outside 1.." +
                            std::to_string(prop.n_sites()));
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(prop.n_sites()));
  for (cplx v : prop.row(k)) p.push_back(std::norm(v));
  return p;
}

/// Infinite-chain limit of the uniform amplitude,
///   f_{k,l}(t) -> (-i)^{|k-l|} J_{|k-l|}(2 J t),
/// the argument 2Jt being fixed by the two-site solution f_{1,2} = -i sin(Jt)
/// at leading order in t. Valid before the wavefront reaches a boundary.
inline cplx bessel_amplitude(int k, int l, double j_scale, double t) {
  const int d = std::abs(k - l);
  static constexpr cplx minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  const double x = 2.0 * j_scale * t;
  double j = std::cyl_bessel_j(static_cast<double>(d), std::abs(x));
  if (x < 0.0 && d % 2 == 1) j = -j;
  return minus_i_pow[d % 4] * j;
}

}  // namespace xxquench

#endif
