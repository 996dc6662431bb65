#ifndef XXQUENCH_CORRELATOR_HPP
#define XXQUENCH_CORRELATOR_HPP

// Expectation values of products of up to four Jordan-Wigner fermion
// operators, optionally followed by the global string S_{1,N}, in product
// initial states.
//
// Conventions (basis order |up>, |down>; an up spin is an occupied mode):
//   sigma^+ = |up><down|,   sigma^- = |down><up|,
//   c_l^dag = S_{1,l-1} sigma_l^+,   c_l = S_{1,l-1} sigma_l^-,
//   S_{l,m} = prod_{k=l..m} (-sigma_k^z)  (so S_{1,N} is the fermion parity).
//
// Operator ordering is resolved by exact 2x2 products at every site, never
// by symbolic sign rules.

#include <array>
#include <bit>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "dense.hpp"
#include "lattice.hpp"
#include "propagator.hpp"

namespace xxquench {

namespace ops {
inline constexpr Mat2 identity{{1.0, 0.0, 0.0, 1.0}};
inline constexpr Mat2 sigma_plus{{0.0, 1.0, 0.0, 0.0}};
inline constexpr Mat2 sigma_minus{{0.0, 0.0, 1.0, 0.0}};
inline constexpr Mat2 minus_sigma_z{{-1.0, 0.0, 0.0, 1.0}};
}  // namespace ops

/// One fermion operator c_site / c_site^dag, either at t = 0 or evolved to
/// the propagator's time.
struct FermionOp {
  int site = 1;
  bool dagger = false;
  bool evolved = false;

  friend bool operator==(const FermionOp&, const FermionOp&) = default;
};

inline constexpr FermionOp c(int site) { return {site, false, false}; }
inline constexpr FermionOp cdag(int site) { return {site, true, false}; }
inline constexpr FermionOp c_t(int site) { return {site, false, true}; }
inline constexpr FermionOp cdag_t(int site) { return {site, true, true}; }

/// Ordered product of at most four fermion operators, optionally times
/// S_{1,N} on the right.
class FermionWord {
public:
  static constexpr std::size_t max_length = 4;

  FermionWord() = default;
  FermionWord(std::initializer_list<FermionOp> factors, bool global_string = false)
      : string_(global_string) {
    if (factors.size() > max_length)
      throw std::invalid_argument("FermionWord: at most 4 factors, got " + std::to_string(factors.size()));
    for (const auto& f : factors) factors_[size_++] = f;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  bool global_string() const noexcept { return string_; }
  const FermionOp& operator[](std::size_t i) const noexcept { return factors_[i]; }
  std::span<const FermionOp> factors() const noexcept { return {factors_.data(), size_}; }

  bool all_static() const noexcept {
    for (std::size_t i = 0; i < size_; ++i)
      if (factors_[i].evolved) return false;
    return true;
  }

  /// Concatenation; the string flag is taken from `rhs`, which must be last.
  FermionWord then(const FermionWord& rhs) const {
    if (string_) throw std::invalid_argument("FermionWord::then: string must be rightmost");
    if (size_ + rhs.size_ > max_length) throw std::invalid_argument("FermionWord: at most 4 factors");
    FermionWord w = *this;
    for (std::size_t i = 0; i < rhs.size_; ++i) w.factors_[w.size_++] = rhs.factors_[i];
    w.string_ = rhs.string_;
    return w;
  }

  /// Reversed, dagger-flipped word (string kept on the right).
  FermionWord reversed_adjoint() const {
    FermionWord w;
    w.string_ = string_;
    for (std::size_t i = 0; i < size_; ++i) {
      FermionOp f = factors_[size_ - 1 - i];
      f.dagger = !f.dagger;
      w.factors_[w.size_++] = f;
    }
    return w;
  }

  FermionWord with_sites(std::span<const int> sites) const {
    FermionWord w = *this;
    for (std::size_t i = 0; i < size_; ++i) w.factors_[i] = {sites[i], factors_[i].dagger, false};
    return w;
  }

  friend bool operator==(const FermionWord& a, const FermionWord& b) {
    if (a.size_ != b.size_ || a.string_ != b.string_) return false;
    for (std::size_t i = 0; i < a.size_; ++i)
      if (!(a.factors_[i] == b.factors_[i])) return false;
    return true;
  }

private:
  std::array<FermionOp, max_length> factors_{};
  std::size_t size_ = 0;
  bool string_ = false;
};

namespace detail {

inline void check_sites(const FermionWord& w, int n) {
  for (const auto& f : w.factors())
    if (f.site < 1 || f.site > n)
      throw std::out_of_range("FermionWord: site " + std::to_string(f.site) + " outside 1.." +
                              std::to_string(n));
}

inline const Mat2& ladder(bool dagger) { return dagger ? ops::sigma_plus : ops::sigma_minus; }

}  // namespace detail

/// Expectation of a static word in a product state, site by site:
/// each c_l contributes -sigma^z left of l and sigma^-+ at l.
inline cplx static_moment(const FermionWord& word, const ProductStateSpec& state) {
  if (!word.all_static()) throw std::invalid_argument("static_moment: word contains evolved factors");
  const int n = state.n_sites();
  detail::check_sites(word, n);
  double value = 1.0;
  for (int k = 1; k <= n && value != 0.0; ++k) {
    Mat2 local = ops::identity;
    for (const auto& f : word.factors()) {
      if (k < f.site)
        local = local * ops::minus_sigma_z;
      else if (k == f.site)
        local = local * detail::ladder(f.dagger);
    }
    if (word.global_string()) local = local * ops::minus_sigma_z;
    value *= state.expectation(k, local);
  }
  return value;
}

/// Static quadratic moments of the singlet product (pairs (2k-1, 2k)):
///   <c_l^dag c_l> = 1/2,  <c_l^dag c_m> = -1/2 for m the partner of l;
///   <c_l c_m^dag S_{1,N}> = (-1)^{N/2} / 2 for m = l or m the partner of l;
/// every other moment of these two shapes vanishes.
inline cplx static_moment_bell(const FermionWord& word, const BellPairStateSpec& pairs) {
  if (!word.all_static()) throw std::invalid_argument("static_moment_bell: word contains evolved factors");
  detail::check_sites(word, pairs.n_sites());
  if (word.size() != 2) throw std::invalid_argument("static_moment_bell: only quadratic words are supported");
  const FermionOp& a = word[0];
  const FermionOp& b = word[1];
  const bool related = a.site == b.site || BellPairStateSpec::partner(a.site) == b.site;
  if (a.dagger && !b.dagger && !word.global_string()) {
    if (a.site == b.site) return 0.5;
    return related ? -0.5 : 0.0;
  }
  if (!a.dagger && b.dagger && word.global_string()) {
    const double parity = pairs.n_pairs() % 2 == 0 ? 1.0 : -1.0;
    return related ? 0.5 * parity : 0.0;
  }
  throw std::invalid_argument(
      "static_moment_bell: supported shapes are c^dag c (no string) and c c^dag S_{1,N}");
}

namespace detail {

// Expansion coefficient of factor f over static operators at site l:
// c_k(t) = sum_l f_{k,l} c_l and c_k^dag(t) = sum_l conj(f_{k,l}) c_l^dag.
inline cplx expansion_coefficient(const FermionOp& f, const Propagator& prop, int l) {
  if (!f.evolved) return f.site == l ? 1.0 : 0.0;
  const cplx v = prop(f.site, l);
  return f.dagger ? std::conj(v) : v;
}

inline void check_dimensions(const ProductStateSpec& state, const Propagator& prop) {
  if (state.n_sites() != prop.n_sites())
    throw std::invalid_argument("state has " + std::to_string(state.n_sites()) +
                                " sites but propagator has " + std::to_string(prop.n_sites()));
}

}  // namespace detail

/// Reference evaluator: expands every evolved factor into its sum over
/// sites and sums static_moment over all N^len index tuples.
inline cplx dynamic_moment_naive(const FermionWord& word, const ProductStateSpec& state,
                                 const Propagator& prop) {
  detail::check_dimensions(state, prop);
  const int n = state.n_sites();
  detail::check_sites(word, n);
  const std::size_t len = word.size();
  std::array<int, FermionWord::max_length> sites{};
  for (std::size_t j = 0; j < len; ++j) sites[j] = word[j].evolved ? 1 : word[j].site;

  cplx total{};
  while (true) {
    cplx coef = 1.0;
    for (std::size_t j = 0; j < len; ++j) coef *= detail::expansion_coefficient(word[j], prop, sites[j]);
    if (coef != 0.0) total += coef * static_moment(word.with_sites(std::span<const int>(sites.data(), len)), state);
    // odometer over the evolved positions
    std::size_t j = 0;
    for (; j < len; ++j) {
      if (!word[j].evolved) continue;
      if (++sites[j] <= n) break;
      sites[j] = 1;
    }
    if (j == len) break;
  }
  return total;
}

/// Left-to-right transfer contraction for one (word, product state) pair.
///
/// Each factor j carries a placement flag. While pending at site k its JW
/// string covers k (local -sigma^z); it becomes placed at k with local
/// sigma^-+ and weight w_j(k) (the propagator coefficient); once placed it
/// contributes the identity. The single-site expectation of each ordered
/// local product depends only on the state, so it is tabulated once here
/// and evaluate() only multiplies in the propagator coefficients:
/// O(N * 3^len) per time.
class TransferPlan {
public:
  TransferPlan(const FermionWord& word, const ProductStateSpec& state)
      : word_(word), n_(state.n_sites()) {
    detail::check_sites(word, n_);
    const std::size_t len = word.size();
    const unsigned full = (1u << len) - 1u;
    sites_.resize(static_cast<std::size_t>(n_));
    for (int k = 1; k <= n_; ++k) {
      auto& list = sites_[static_cast<std::size_t>(k - 1)];
      for (unsigned placed = 0; placed <= full; ++placed) {
        const unsigned free = full & ~placed;
        // enumerate every subset `now` of the still-pending factors
        for (unsigned now = free;; now = (now - 1) & free) {
          Mat2 local = ops::identity;
          for (std::size_t j = 0; j < len; ++j) {
            const unsigned bit = 1u << j;
            if (now & bit)
              local = local * detail::ladder(word[j].dagger);
            else if (!(placed & bit))
              local = local * ops::minus_sigma_z;
          }
          if (word.global_string()) local = local * ops::minus_sigma_z;
          const double e = state.expectation(k, local);
          if (e != 0.0) list.push_back({static_cast<std::uint8_t>(placed), static_cast<std::uint8_t>(now), e});
          if (now == 0) break;
        }
      }
    }
  }

  const FermionWord& word() const noexcept { return word_; }

  cplx evaluate(const Propagator& prop) const {
    if (prop.n_sites() != n_)
      throw std::invalid_argument("TransferPlan: propagator has " + std::to_string(prop.n_sites()) +
                                  " sites, plan has " + std::to_string(n_));
    const std::size_t len = word_.size();
    const unsigned states = 1u << len;
    const unsigned full = states - 1u;
    std::array<cplx, 16> weight{};
    std::array<cplx, 16> next{};
    std::array<cplx, 16> subset_coef{};
    weight[0] = 1.0;
    for (int k = 1; k <= n_; ++k) {
      subset_coef[0] = 1.0;
      for (unsigned s = 1; s < states; ++s) {
        const unsigned low = static_cast<unsigned>(std::countr_zero(s));
        subset_coef[s] = subset_coef[s & (s - 1)] * detail::expansion_coefficient(word_[low], prop, k);
      }
      next.fill(cplx{});
      for (const auto& tr : sites_[static_cast<std::size_t>(k - 1)]) {
        const cplx w = weight[tr.placed];
        if (w == 0.0) continue;
        next[tr.placed | tr.now] += w * subset_coef[tr.now] * tr.expectation;
      }
      weight = next;
    }
    return weight[full];
  }

private:
  struct Transition {
    std::uint8_t placed;
    std::uint8_t now;
    double expectation;
  };

  FermionWord word_;
  int n_;
  std::vector<std::vector<Transition>> sites_;
};

inline cplx dynamic_moment_transfer(const FermionWord& word, const ProductStateSpec& state,
                                    const Propagator& prop) {
  detail::check_dimensions(state, prop);
  return TransferPlan(word, state).evaluate(prop);
}

}  // namespace xxquench

#endif
