#ifndef XXQUENCH_RDM_HPP
#define XXQUENCH_RDM_HPP

// Reduced density matrix of the two end spins (1, N) in the basis
// {|up up>, |up down>, |down up>, |down down>}.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "correlator.hpp"
#include "dense.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "propagator.hpp"

namespace xxquench {

class TwoSpinDensityMatrix {
public:
  static constexpr double hermiticity_tolerance = 1e-10;
  static constexpr double trace_tolerance = 1e-10;

  /// Throws NumericalError if `entries` is not Hermitian with unit trace
  /// (within the tolerances above). Positivity is checked by the
  /// entanglement measures, which need the spectrum anyway.
  explicit TwoSpinDensityMatrix(const Mat4c& entries, double time = 0.0) : rho_(entries), time_(time) {
    const double herm = max_abs_diff(rho_, adjoint(rho_));
    if (!(herm <= hermiticity_tolerance))
      throw NumericalError("TwoSpinDensityMatrix: not Hermitian (deviation " + std::to_string(herm) + ")");
    const cplx tr = rho_.trace();
    if (!(std::abs(tr - 1.0) <= trace_tolerance))
      throw NumericalError("TwoSpinDensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
  }

  const Mat4c& entries() const noexcept { return rho_; }
  cplx operator()(std::size_t i, std::size_t j) const noexcept { return rho_(i, j); }
  double time() const noexcept { return time_; }

private:
  Mat4c rho_;
  double time_;
};

/// rho_{ab} = <O_1 O_N> with O_i = |b_i><a_i|. Per-site operators in fermion
/// words (at time t, Heisenberg picture):
///   site 1:  P^up = c1^dag c1,  P^down = 1 - c1^dag c1,
///            sigma^- = c1,      sigma^+ = c1^dag;
///   site N:  P^up = cN^dag cN,  P^down = 1 - cN^dag cN,
///            sigma^- = S_{1,N-1} cN = -cN S_{1,N},
///            sigma^+ = S_{1,N-1} cN^dag = cN^dag S_{1,N}.
/// The site-N forms use (-sigma^z_N) cN = cN and anticommutation of cN
/// with the parity S_{1,N}; S_{1,N} commutes with H_XX so it is not evolved.
struct WordTerm {
  double coefficient;
  FermionWord word;  // empty word: identity
};

struct ElementExpansion {
  std::size_t row;
  std::size_t col;
  std::vector<WordTerm> terms;
};

inline std::array<ElementExpansion, 16> rdm_element_table(int n_sites) {
  if (n_sites < 2) throw std::invalid_argument("rdm_element_table: need N >= 2");
  const int n = n_sites;
  // index: 2*a + b for the operator |b><a|, up = 0, down = 1
  const std::array<std::vector<WordTerm>, 4> first = {{
      {{1.0, FermionWord{cdag_t(1), c_t(1)}}},                              // |up><up|
      {{1.0, FermionWord{c_t(1)}}},                                         // |down><up|
      {{1.0, FermionWord{cdag_t(1)}}},                                      // |up><down|
      {{1.0, FermionWord{}}, {-1.0, FermionWord{cdag_t(1), c_t(1)}}},       // |down><down|
  }};
  const std::array<std::vector<WordTerm>, 4> last = {{
      {{1.0, FermionWord{cdag_t(n), c_t(n)}}},
      {{-1.0, FermionWord({c_t(n)}, true)}},
      {{1.0, FermionWord({cdag_t(n)}, true)}},
      {{1.0, FermionWord{}}, {-1.0, FermionWord{cdag_t(n), c_t(n)}}},
  }};
  std::array<ElementExpansion, 16> table;
  for (std::size_t a1 = 0; a1 < 2; ++a1)
    for (std::size_t aN = 0; aN < 2; ++aN)
      for (std::size_t b1 = 0; b1 < 2; ++b1)
        for (std::size_t bN = 0; bN < 2; ++bN) {
          const std::size_t row = 2 * a1 + aN;
          const std::size_t col = 2 * b1 + bN;
          ElementExpansion& e = table[4 * row + col];
          e.row = row;
          e.col = col;
          for (const auto& s1 : first[2 * a1 + b1])
            for (const auto& sN : last[2 * aN + bN])
              e.terms.push_back({s1.coefficient * sN.coefficient, s1.word.then(sN.word)});
        }
  return table;
}

/// Evaluates rho_{1,N}(t) for one product initial state at many times.
/// Transfer plans are built once per distinct word.
class ProductRdmEngine {
public:
  explicit ProductRdmEngine(const ProductStateSpec& state) : n_(state.n_sites()) {
    const auto table = rdm_element_table(n_);
    for (std::size_t e = 0; e < 16; ++e) {
      for (const auto& term : table[e].terms) {
        std::size_t idx = plans_.size();
        if (term.word.empty()) {
          idx = identity_index;
        } else {
          for (std::size_t p = 0; p < plans_.size(); ++p)
            if (plans_[p].word() == term.word) idx = p;
          if (idx == plans_.size()) plans_.emplace_back(term.word, state);
        }
        terms_[e].push_back({term.coefficient, idx});
      }
    }
  }

  int n_sites() const noexcept { return n_; }

  Mat4c entries(const Propagator& prop) const {
    if (prop.n_sites() != n_)
      throw std::invalid_argument("rdm_product: state has " + std::to_string(n_) + " sites, propagator has " +
                                  std::to_string(prop.n_sites()));
    std::vector<cplx> moments(plans_.size());
    for (std::size_t p = 0; p < plans_.size(); ++p) moments[p] = plans_[p].evaluate(prop);
    Mat4c rho;
    for (std::size_t e = 0; e < 16; ++e) {
      cplx v{};
      for (const auto& [coef, idx] : terms_[e]) v += coef * (idx == identity_index ? cplx{1.0} : moments[idx]);
      rho.a[e] = v;
    }
    return rho;
  }

  TwoSpinDensityMatrix operator()(const Propagator& prop) const {
    return TwoSpinDensityMatrix(entries(prop), prop.time());
  }

private:
  static constexpr std::size_t identity_index = static_cast<std::size_t>(-1);
  struct Term {
    double coefficient;
    std::size_t plan;
  };
  int n_;
  std::vector<TransferPlan> plans_;
  std::array<std::vector<Term>, 16> terms_;
};

inline TwoSpinDensityMatrix rdm_product(const ProductStateSpec& state, const Propagator& prop) {
  return ProductRdmEngine(state)(prop);
}

/// The six nonzero entries of the Bell-pair X-form
///   [[a, 0, 0, 0], [0, b, c, 0], [0, c', b', 0], [0, 0, 0, a']].
struct BellBlock {
  double a;
  double a_prime;
  double b;
  double b_prime;
  cplx c;
  cplx c_prime;
};

namespace detail {

// Sparse static moments of the singlet product as rows of (partner, value):
// every nonzero <c_l^dag c_m> or <c_l c_m^dag S> sits at m = l or m = partner(l).
struct BellStatics {
  std::vector<double> hop_diag, hop_partner;      // <c_l^dag c_m>
  std::vector<double> string_diag, string_partner;  // <c_l c_m^dag S_{1,N}>

  explicit BellStatics(const BellPairStateSpec& pairs) {
    const int n = pairs.n_sites();
    for (int l = 1; l <= n; ++l) {
      const int p = BellPairStateSpec::partner(l);
      hop_diag.push_back(static_moment_bell(FermionWord{cdag(l), c(l)}, pairs).real());
      hop_partner.push_back(static_moment_bell(FermionWord{cdag(l), c(p)}, pairs).real());
      string_diag.push_back(static_moment_bell(FermionWord({c(l), cdag(l)}, true), pairs).real());
      string_partner.push_back(static_moment_bell(FermionWord({c(l), cdag(p)}, true), pairs).real());
    }
  }
};

}  // namespace detail

inline BellBlock bell_block(const BellPairStateSpec& pairs, const Propagator& prop) {
  const int n = pairs.n_sites();
  if (prop.n_sites() != n)
    throw std::invalid_argument("rdm_bell: state has " + std::to_string(n) + " sites, propagator has " +
                                std::to_string(prop.n_sites()));
  const detail::BellStatics st(pairs);
  // <c_i^dag(t) c_j(t)> = sum_{l,m} conj(f_il) f_jm <c_l^dag c_m>
  auto hop = [&](int i, int j) {
    cplx s{};
    for (int l = 1; l <= n; ++l) {
      const std::size_t li = static_cast<std::size_t>(l - 1);
      const int p = BellPairStateSpec::partner(l);
      s += std::conj(prop(i, l)) * (st.hop_diag[li] * prop(j, l) + st.hop_partner[li] * prop(j, p));
    }
    return s;
  };
  // sum_{l,m} f_il conj(f_jm) <c_l c_m^dag S_{1,N}>
  auto string = [&](int i, int j) {
    cplx s{};
    for (int l = 1; l <= n; ++l) {
      const std::size_t li = static_cast<std::size_t>(l - 1);
      const int p = BellPairStateSpec::partner(l);
      s += prop(i, l) * (st.string_diag[li] * std::conj(prop(j, l)) + st.string_partner[li] * std::conj(prop(j, p)));
    }
    return s;
  };
  const double n1 = hop(1, 1).real();
  const double nN = hop(n, n).real();
  BellBlock blk{};
  blk.a = nN * n1 - (hop(n, 1) * hop(1, n)).real();
  blk.a_prime = 1.0 - n1 - nN + blk.a;
  blk.b = n1 - blk.a;
  blk.b_prime = nN - blk.a;
  blk.c = string(1, n);
  blk.c_prime = string(n, 1);
  return blk;
}

inline TwoSpinDensityMatrix rdm_bell(const BellPairStateSpec& pairs, const Propagator& prop) {
  const BellBlock blk = bell_block(pairs, prop);
  Mat4c rho;
  rho(0, 0) = blk.a;
  rho(1, 1) = blk.b;
  rho(1, 2) = blk.c;
  rho(2, 1) = blk.c_prime;
  rho(2, 2) = blk.b_prime;
  rho(3, 3) = blk.a_prime;
  return TwoSpinDensityMatrix(rho, prop.time());
}

/// Weighted sum of the component RDMs; evolution is linear in rho(0).
class MixtureRdmEngine {
public:
  explicit MixtureRdmEngine(const MixtureSpec& mix) {
    for (const auto& comp : mix.components()) {
      weights_.push_back(comp.weight);
      engines_.emplace_back(comp.state);
    }
  }

  TwoSpinDensityMatrix operator()(const Propagator& prop) const {
    Mat4c rho;
    for (std::size_t i = 0; i < engines_.size(); ++i) rho = rho + weights_[i] * engines_[i].entries(prop);
    return TwoSpinDensityMatrix(rho, prop.time());
  }

private:
  std::vector<double> weights_;
  std::vector<ProductRdmEngine> engines_;
};

inline TwoSpinDensityMatrix rdm_mixture(const MixtureSpec& mix, const Propagator& prop) {
  return MixtureRdmEngine(mix)(prop);
}

}  // namespace xxquench

#endif
