#ifndef XXQUENCH_ORACLE_HPP
#define XXQUENCH_ORACLE_HPP

// Brute-force exact diagonalization on the full 2^N Hilbert space, used as
// ground truth for the free-fermion engine.
//
// Basis index convention: site 1 is the most significant bit, and a 0 bit
// is spin up. So for N = 2 the order is |uu>, |ud>, |du>, |dd>.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "correlator.hpp"
#include "dense.hpp"
#include "jacobi.hpp"
#include "lattice.hpp"
#include "rdm.hpp"

namespace xxquench::ed {

inline constexpr int max_sites = 14;

/// Bit of `site` (1-based) in a basis index of an n-site chain.
constexpr std::uint32_t site_bit(int n, int site) noexcept { return 1u << (n - site); }

class FullState {
public:
  FullState(int n_sites, std::vector<cplx> amplitudes) : n_(n_sites), amps_(std::move(amplitudes)) {
    if (n_ < 1 || n_ > max_sites) throw std::invalid_argument("FullState: N outside 1..14");
    if (amps_.size() != (std::size_t{1} << n_)) throw std::invalid_argument("FullState: length must be 2^N");
  }

  static FullState product(const ProductStateSpec& spec) {
    const int n = spec.n_sites();
    if (n > max_sites) throw std::invalid_argument("FullState: N above cap 14");
    std::vector<cplx> amps(std::size_t{1} << n);
    for (std::uint32_t idx = 0; idx < amps.size(); ++idx) {
      double a = 1.0;
      for (int k = 1; k <= n && a != 0.0; ++k) {
        const auto [up, down] = spec.amplitudes(k);
        a *= (idx & site_bit(n, k)) ? down : up;
      }
      amps[idx] = a;
    }
    return FullState(n, std::move(amps));
  }

  /// Singlets (|ud> - |du>)/sqrt2 on every pair (2k-1, 2k).
  static FullState bell_pairs(const BellPairStateSpec& spec) {
    const int n = spec.n_sites();
    if (n > max_sites) throw std::invalid_argument("FullState: N above cap 14");
    std::vector<cplx> amps(std::size_t{1} << n);
    const double norm = std::pow(0.5, 0.5 * spec.n_pairs());
    for (std::uint32_t idx = 0; idx < amps.size(); ++idx) {
      double a = norm;
      for (int p = 1; p <= spec.n_pairs() && a != 0.0; ++p) {
        const bool first_down = idx & site_bit(n, 2 * p - 1);
        const bool second_down = idx & site_bit(n, 2 * p);
        if (first_down == second_down)
          a = 0.0;
        else if (first_down)
          a = -a;
      }
      amps[idx] = a;
    }
    return FullState(n, std::move(amps));
  }

  int n_sites() const noexcept { return n_; }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  std::vector<cplx>& mutable_amplitudes() noexcept { return amps_; }

  double norm() const {
    double s = 0.0;
    for (cplx a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

private:
  int n_;
  std::vector<cplx> amps_;
};

inline cplx inner(const FullState& a, const FullState& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.amplitudes().size(); ++i) s += std::conj(a.amplitudes()[i]) * b.amplitudes()[i];
  return s;
}

/// H = sum_k (J_k/2)(sx sx + sy sy + Delta sz sz) with open boundaries, as a
/// list of nonzero entries. The hopping part flips antiparallel neighbours
/// with amplitude J_k; the Ising part is diagonal, +-J_k Delta / 2.
class SparseHamiltonian {
public:
  struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };

  SparseHamiltonian(int n_sites, std::vector<Entry> entries) : n_(n_sites), entries_(std::move(entries)) {}

  int n_sites() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return std::size_t{1} << n_; }
  std::span<const Entry> entries() const noexcept { return entries_; }

  std::vector<cplx> apply(std::span<const cplx> v) const {
    std::vector<cplx> out(v.size());
    for (const auto& e : entries_) out[e.row] += e.value * v[e.col];
    return out;
  }

  cplx expectation(const FullState& s) const {
    const auto hv = apply(s.amplitudes());
    cplx acc{};
    for (std::size_t i = 0; i < hv.size(); ++i) acc += std::conj(s.amplitudes()[i]) * hv[i];
    return acc;
  }

private:
  int n_;
  std::vector<Entry> entries_;
};

inline SparseHamiltonian build_hamiltonian(const CouplingProfile& profile, double delta_aniso) {
  const int n = profile.n_sites();
  if (n > max_sites)
    throw std::invalid_argument("build_hamiltonian: N=" + std::to_string(n) + " above the cap of 14");
  const std::uint32_t dim = 1u << n;
  std::vector<SparseHamiltonian::Entry> entries;
  for (std::uint32_t idx = 0; idx < dim; ++idx) {
    double diag = 0.0;
    for (int k = 1; k < n; ++k) {
      const double jk = profile.bond(k);
      const std::uint32_t bk = site_bit(n, k);
      const std::uint32_t bk1 = site_bit(n, k + 1);
      const bool parallel = ((idx & bk) != 0) == ((idx & bk1) != 0);
      diag += 0.5 * jk * delta_aniso * (parallel ? 1.0 : -1.0);
      if (!parallel && jk != 0.0) entries.push_back({idx ^ bk ^ bk1, idx, jk});
    }
    if (diag != 0.0) entries.push_back({idx, idx, diag});
  }
  return SparseHamiltonian(n, std::move(entries));
}

/// Full eigendecomposition of H, block by block in the magnetization
/// sectors (H conserves the number of down spins for any Delta).
class Spectrum {
public:
  explicit Spectrum(const SparseHamiltonian& h) : n_(h.n_sites()) {
    const std::uint32_t dim = static_cast<std::uint32_t>(h.dimension());
    std::vector<std::vector<std::uint32_t>> members(static_cast<std::size_t>(n_ + 1));
    std::vector<std::uint32_t> position(dim);
    for (std::uint32_t idx = 0; idx < dim; ++idx) {
      auto& m = members[static_cast<std::size_t>(std::popcount(idx))];
      position[idx] = static_cast<std::uint32_t>(m.size());
      m.push_back(idx);
    }
    std::vector<Matrix<double>> blocks;
    for (const auto& m : members) blocks.emplace_back(m.size(), m.size());
    for (const auto& e : h.entries()) {
      const int s = std::popcount(e.row);
      if (s != std::popcount(e.col)) throw std::logic_error("Spectrum: H mixes magnetization sectors");
      blocks[static_cast<std::size_t>(s)](position[e.row], position[e.col]) += e.value;
    }
    for (std::size_t s = 0; s < members.size(); ++s) {
      SymmetricEigen eig = jacobi_eigen(std::move(blocks[s]));
      sectors_.push_back({std::move(members[s]), std::move(eig.values), std::move(eig.vectors)});
    }
  }

  int n_sites() const noexcept { return n_; }

  std::vector<double> sector_energies(int n_down) const {
    return sectors_.at(static_cast<std::size_t>(n_down)).energies;
  }

  /// e^{-iHt} applied to `state`.
  FullState evolve(const FullState& state, double t) const {
    if (state.n_sites() != n_) throw std::invalid_argument("ed_evolve: dimension mismatch");
    std::vector<cplx> out(state.amplitudes().size());
    for (const auto& sec : sectors_) {
      const std::size_t d = sec.basis.size();
      std::vector<cplx> coef(d);
      for (std::size_t m = 0; m < d; ++m) {
        cplx s{};
        for (std::size_t i = 0; i < d; ++i) s += sec.vectors(i, m) * state.amplitudes()[sec.basis[i]];
        coef[m] = s * std::polar(1.0, -sec.energies[m] * t);
      }
      for (std::size_t i = 0; i < d; ++i) {
        cplx s{};
        for (std::size_t m = 0; m < d; ++m) s += sec.vectors(i, m) * coef[m];
        out[sec.basis[i]] = s;
      }
    }
    return FullState(n_, std::move(out));
  }

private:
  struct Sector {
    std::vector<std::uint32_t> basis;
    std::vector<double> energies;
    Matrix<double> vectors;
  };
  int n_;
  std::vector<Sector> sectors_;
};

inline FullState ed_evolve(const FullState& state, const Spectrum& spectrum, double t) {
  return spectrum.evolve(state, t);
}

inline FullState ed_evolve(const FullState& state, const SparseHamiltonian& h, double t) {
  return Spectrum(h).evolve(state, t);
}

/// Partial trace over sites 2..N-1.
inline Mat4c ed_rdm_ends_entries(const FullState& state) {
  const int n = state.n_sites();
  if (n < 2) throw std::invalid_argument("ed_rdm_ends: need N >= 2");
  const std::uint32_t b1 = site_bit(n, 1);
  const std::uint32_t bn = site_bit(n, n);
  auto end_index = [&](std::uint32_t idx) { return 2u * ((idx & b1) ? 1u : 0u) + ((idx & bn) ? 1u : 0u); };
  const auto amps = state.amplitudes();
  Mat4c rho;
  for (std::uint32_t i = 0; i < amps.size(); ++i) {
    if (amps[i] == 0.0) continue;
    const std::uint32_t mid = i & ~(b1 | bn);
    for (std::uint32_t e = 0; e < 4; ++e) {
      const std::uint32_t j = mid | ((e & 2u) ? b1 : 0u) | ((e & 1u) ? bn : 0u);
      rho(end_index(i), e) += amps[i] * std::conj(amps[j]);
    }
  }
  return rho;
}

inline TwoSpinDensityMatrix ed_rdm_ends(const FullState& state, double time = 0.0) {
  return TwoSpinDensityMatrix(ed_rdm_ends_entries(state), time);
}

/// Applies a static fermion word (rightmost factor first) to a state.
inline FullState apply_word(const FermionWord& word, const FullState& state) {
  if (!word.all_static()) throw std::invalid_argument("apply_word: word contains evolved factors");
  const int n = state.n_sites();
  detail::check_sites(word, n);
  std::vector<cplx> v(state.amplitudes().begin(), state.amplitudes().end());
  auto parity_sign = [](std::uint32_t bits) { return std::popcount(bits) % 2 == 0 ? 1.0 : -1.0; };
  // -sigma^z is +1 on a down spin (bit set) and -1 on an up spin.
  auto string_sign = [&](std::uint32_t idx, std::uint32_t mask) {
    return parity_sign(~idx & mask);
  };
  const std::uint32_t all = (1u << n) - 1u;
  if (word.global_string())
    for (std::uint32_t i = 0; i <= all; ++i) v[i] *= string_sign(i, all);
  for (std::size_t f = word.size(); f-- > 0;) {
    const FermionOp& op = word[f];
    const std::uint32_t b = site_bit(n, op.site);
    // sites 1..site-1 occupy the bits above b
    const std::uint32_t left = all & ~((b << 1) - 1u);
    std::vector<cplx> w(v.size());
    for (std::uint32_t i = 0; i <= all; ++i) {
      if (v[i] == 0.0) continue;
      const bool down = i & b;
      // c^dag = sigma^+ takes down -> up; c = sigma^- takes up -> down
      if (op.dagger != down) continue;
      const std::uint32_t j = i ^ b;
      w[j] += string_sign(j, left) * v[i];
    }
    v = std::move(w);
  }
  return FullState(n, std::move(v));
}

/// <state| word |state> for a static word.
inline cplx ed_moment(const FermionWord& word, const FullState& state) {
  return inner(state, apply_word(word, state));
}

}  // namespace xxquench::ed

#endif
