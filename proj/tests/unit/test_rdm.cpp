#include <gtest/gtest.h>

#include <random>

#include <xxquench/disorder.hpp>
#include <xxquench/entanglement.hpp>
#include <xxquench/oracle.hpp>
#include <xxquench/rdm.hpp>

#include "support/oracles.hpp"

using namespace xxquench;

namespace {

Mat4c diag(double a, double b, double c, double d) {
  Mat4c m;
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  m(3, 3) = d;
  return m;
}

Mat4c ed_rdm(const ed::FullState& psi, const CouplingProfile& prof, double t) {
  const ed::Spectrum sp(ed::build_hamiltonian(prof, 0.0));
  return ed::ed_rdm_ends_entries(sp.evolve(psi, t));
}

void expect_valid(const Mat4c& rho) {
  EXPECT_LT(max_abs_diff(rho, adjoint(rho)), 1e-10);
  EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-10);
  EXPECT_GE(hermitian_eigenvalues(rho)[0], -1e-8);
}

}  // namespace

TEST(RdmTable, SixteenEntriesWithBoundedWords) {
  const auto table = rdm_element_table(6);
  for (std::size_t e = 0; e < 16; ++e) {
    EXPECT_EQ(table[e].row * 4 + table[e].col, e);
    EXPECT_FALSE(table[e].terms.empty());
    for (const auto& term : table[e].terms) EXPECT_LE(term.word.size(), 4u);
  }
  EXPECT_THROW(rdm_element_table(1), std::invalid_argument);
}

// Every table entry checked on its own against the exact partial trace.
TEST(RdmTable, EachElementMatchesExactDiagonalization) {
  std::mt19937_64 rng(5);
  for (int n : {2, 3, 5}) {
    const ProductStateSpec st(oracles::random_angles(rng, n));
    const auto psi = ed::FullState::product(st);
    const ChainSpec spec(n);
    const Mat4c ref = ed_rdm(psi, CouplingProfile::uniform(spec), 0.8);
    const auto rho = rdm_product(st, analytic_propagator(spec, 0.8));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        EXPECT_LT(std::abs(rho(i, j) - ref(i, j)), 1e-12) << "N=" << n << " entry " << i << j;
  }
}

TEST(RdmProduct, NeelAtTimeZero) {
  const auto rho = rdm_product(neel_state(4), analytic_propagator(ChainSpec(4), 0.0));
  EXPECT_LT(max_abs_diff(rho.entries(), diag(0, 1, 0, 0)), 1e-14);
}

TEST(RdmProduct, AllUpIsStationary) {
  for (double t : {0.0, 1.0, 7.5}) {
    const auto rho = rdm_product(canted_state(6, 0.0), analytic_propagator(ChainSpec(6), t));
    EXPECT_LT(max_abs_diff(rho.entries(), diag(1, 0, 0, 0)), 1e-14);
  }
}

TEST(RdmProduct, NeelEightSitesMatchesExactDiagonalization) {
  const auto st = neel_state(8);
  const Mat4c ref = ed_rdm(ed::FullState::product(st), CouplingProfile::uniform(ChainSpec(8)), 1.7);
  EXPECT_LT(max_abs_diff(rdm_product(st, analytic_propagator(ChainSpec(8), 1.7)).entries(), ref), 1e-9);
}

TEST(RdmProduct, DisorderedCouplingsMatchExactDiagonalization) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto prof = gaussian_couplings(ChainSpec(7), 0.3, seed);
    const ProductStateSpec st({0.3, 2.0, 4.1, 1.2, 5.5, 0.9, 3.3});
    const Mat4c ref = ed_rdm(ed::FullState::product(st), prof, 2.2);
    EXPECT_LT(max_abs_diff(rdm_product(st, numeric_propagator(prof, 2.2)).entries(), ref), 1e-9);
  }
}

TEST(RdmProduct, DimensionMismatch) {
  EXPECT_THROW(rdm_product(neel_state(4), analytic_propagator(ChainSpec(5), 1.0)), std::invalid_argument);
  EXPECT_THROW(rdm_bell(BellPairStateSpec(2), analytic_propagator(ChainSpec(6), 1.0)), std::invalid_argument);
}

TEST(RdmProduct, ValidDensityMatricesOnRandomSweep) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> tt(0.0, 20.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 11;
    const ProductStateSpec st(oracles::random_angles(rng, n));
    expect_valid(rdm_product(st, analytic_propagator(ChainSpec(n), tt(rng))).entries());
  }
}

TEST(RdmProduct, NoCoherenceBetweenUpUpAndDownDown) {
  const auto neel = neel_state(10);
  const auto flipped = flipped_state(neel, 4);
  for (double t : {0.5, 2.5, 6.0})
    for (const auto& st : {neel, flipped}) {
      const auto rho = rdm_product(st, analytic_propagator(ChainSpec(10), t));
      EXPECT_LT(std::abs(rho(0, 3)), 1e-12);
      EXPECT_LT(std::abs(rho(3, 0)), 1e-12);
    }
}

TEST(RdmProduct, AlphaReflectionSymmetry) {
  const Mat4c zz = diag(1, -1, -1, 1);
  for (double alpha : {0.4, 1.9, 2.8}) {
    for (double t : {0.7, 3.1}) {
      const auto prop = analytic_propagator(ChainSpec(9), t);
      const Mat4c a = rdm_product(canted_state(9, alpha), prop).entries();
      const Mat4c b = rdm_product(canted_state(9, two_pi - alpha), prop).entries();
      EXPECT_LT(max_abs_diff(b, zz * a * zz), 1e-10);
    }
  }
}

TEST(RdmBell, MaximallyMixedAtTimeZero) {
  const auto rho = rdm_bell(BellPairStateSpec(4), analytic_propagator(ChainSpec(8), 0.0));
  EXPECT_LT(max_abs_diff(rho.entries(), diag(0.25, 0.25, 0.25, 0.25)), 1e-14);
}

TEST(RdmBell, EightSitesMatchesExactDiagonalization) {
  const BellPairStateSpec pairs(4);
  const Mat4c ref = ed_rdm(ed::FullState::bell_pairs(pairs), CouplingProfile::uniform(ChainSpec(8)), 0.9);
  EXPECT_LT(max_abs_diff(rdm_bell(pairs, analytic_propagator(ChainSpec(8), 0.9)).entries(), ref), 1e-9);
}

TEST(RdmBell, SingleSingletIsStationary) {
  // two sites, nothing traced out: the singlet itself at every time
  const double r = 1.0 / std::sqrt(2.0);
  const Mat4c singlet = oracles::projector({0.0, r, -r, 0.0});
  for (double t : {0.0, 0.8, 5.0})
    EXPECT_LT(max_abs_diff(rdm_bell(BellPairStateSpec(1), analytic_propagator(ChainSpec(2), t)).entries(), singlet),
              1e-13);
}

TEST(RdmBell, TraceIdentityAndZeroPattern) {
  for (int n : {4, 10, 24}) {
    for (double t : {0.3, 2.9, 7.7}) {
      const auto prop = analytic_propagator(ChainSpec(n), t);
      const BellBlock b = bell_block(BellPairStateSpec::for_sites(n), prop);
      EXPECT_NEAR(b.a + b.a_prime + b.b + b.b_prime, 1.0, 1e-12);
      const auto rho = rdm_bell(BellPairStateSpec::for_sites(n), prop);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          const bool slot = i == j || (i == 1 && j == 2) || (i == 2 && j == 1);
          if (!slot) {
            EXPECT_LT(std::abs(rho(i, j)), 1e-12);
          }
        }
      expect_valid(rho.entries());
      EXPECT_NEAR(x_state_concurrence(b), concurrence(rho), 1e-10);
    }
  }
}

TEST(RdmBell, DisorderedCouplingsMatchExactDiagonalization) {
  const auto prof = gaussian_couplings(ChainSpec(8), 0.2, 9);
  const BellPairStateSpec pairs(4);
  const Mat4c ref = ed_rdm(ed::FullState::bell_pairs(pairs), prof, 1.6);
  EXPECT_LT(max_abs_diff(rdm_bell(pairs, numeric_propagator(prof, 1.6)).entries(), ref), 1e-9);
}

TEST(RdmMixture, ZeroEpsilonIsThePureState) {
  const auto prop = analytic_propagator(ChainSpec(8), 1.3);
  const auto mix = flip_mixture(FlipEnsemble(0.0, neel_state(8)));
  EXPECT_EQ(rdm_mixture(mix, prop).entries(), rdm_product(neel_state(8), prop).entries());
}

TEST(RdmMixture, MixtureOfAStateWithItself) {
  const auto st = canted_state(6, 1.1);
  const auto prop = analytic_propagator(ChainSpec(6), 2.0);
  const MixtureSpec mix({{0.5, st}, {0.5, st}});
  EXPECT_LT(max_abs_diff(rdm_mixture(mix, prop).entries(), rdm_product(st, prop).entries()), 1e-15);
}

TEST(RdmMixture, FlipMixtureMatchesExactDiagonalization) {
  const auto base = neel_state(8);
  const auto mix = flip_mixture(FlipEnsemble::from_total(0.1, base));
  const auto prof = CouplingProfile::uniform(ChainSpec(8));
  Mat4c ref;
  for (const auto& comp : mix.components())
    ref = ref + comp.weight * ed_rdm(ed::FullState::product(comp.state), prof, 1.1);
  EXPECT_LT(max_abs_diff(rdm_mixture(mix, analytic_propagator(ChainSpec(8), 1.1)).entries(), ref), 1e-9);
}

TEST(TwoSpinDensityMatrix, RejectsNonHermitianOrBadTrace) {
  Mat4c m = diag(0.25, 0.25, 0.25, 0.25);
  m(0, 1) = 0.1;
  EXPECT_THROW(TwoSpinDensityMatrix{m}, NumericalError);
  EXPECT_THROW(TwoSpinDensityMatrix(diag(0.5, 0.5, 0.5, 0.0)), NumericalError);
  EXPECT_NO_THROW(TwoSpinDensityMatrix(diag(0.5, 0.5, 0.0, 0.0)));
}
