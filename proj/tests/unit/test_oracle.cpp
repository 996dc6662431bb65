#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <xxquench/oracle.hpp>

#include "support/oracles.hpp"

using namespace xxquench;
using namespace xxquench::ed;

namespace {

double sigma_z_total(const FullState& s) {
  const int n = s.n_sites();
  double m = 0.0;
  const auto a = s.amplitudes();
  for (std::uint32_t i = 0; i < a.size(); ++i)
    m += std::norm(a[i]) * (n - 2.0 * std::popcount(i));
  return m;
}

}  // namespace

// |u d> for N = 2 is index 1: site 1 is the high bit, down is a set bit.
TEST(Oracle, BitOrderingHandCase) {
  const auto s = FullState::product(ProductStateSpec({0.0, pi}));
  EXPECT_NEAR(std::abs(s.amplitudes()[1]), 1.0, 1e-15);
  for (int i : {0, 2, 3}) EXPECT_NEAR(std::abs(s.amplitudes()[static_cast<std::size_t>(i)]), 0.0, 1e-15);
  EXPECT_EQ(site_bit(2, 1), 2u);
  EXPECT_EQ(site_bit(2, 2), 1u);
  const auto h = build_hamiltonian(CouplingProfile({1.0}), 0.0);
  const auto hv = h.apply(s.amplitudes());
  // hopping takes |u d> to |d u> with amplitude J
  EXPECT_NEAR(std::abs(hv[2] - 1.0), 0.0, 1e-15);
}

TEST(Oracle, SingletIsStationary) {
  const auto s = FullState::bell_pairs(BellPairStateSpec(1));
  const Spectrum sp(build_hamiltonian(CouplingProfile({1.0}), 0.0));
  const Mat4c r0 = ed_rdm_ends_entries(s);
  for (double t : {0.4, 2.0, 9.1}) EXPECT_LT(max_abs_diff(ed_rdm_ends_entries(sp.evolve(s, t)), r0), 1e-13);
  EXPECT_NEAR(build_hamiltonian(CouplingProfile({1.0}), 0.0).expectation(s).real(), -1.0, 1e-14);
}

TEST(Oracle, AllUpHasZeroEnergyWithoutAnisotropy) {
  const auto s = FullState::product(canted_state(6, 0.0));
  const auto h = build_hamiltonian(CouplingProfile::uniform(ChainSpec(6)), 0.0);
  for (cplx v : h.apply(s.amplitudes())) EXPECT_EQ(v, 0.0);
  const auto hz = build_hamiltonian(CouplingProfile::uniform(ChainSpec(6)), 0.5);
  EXPECT_NEAR(hz.expectation(s).real(), 5 * 0.5 / 2.0, 1e-14);
}

TEST(Oracle, SingleExcitationBand) {
  const Spectrum sp(build_hamiltonian(CouplingProfile::uniform(ChainSpec(8)), 0.0));
  auto e = sp.sector_energies(1);
  std::vector<double> expected;
  for (int m = 1; m <= 8; ++m) expected.push_back(2.0 * std::cos(pi * m / 9));
  std::sort(e.begin(), e.end());
  std::sort(expected.begin(), expected.end());
  ASSERT_EQ(e.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(e[i], expected[i], 1e-10);
}

TEST(Oracle, EvolutionIsUnitaryAndConservative) {
  std::mt19937_64 rng(6);
  const int n = 8;
  const auto prof = gaussian_couplings(ChainSpec(n), 0.2, 4);
  const auto h = build_hamiltonian(prof, 0.3);
  const Spectrum sp(h);
  const auto s = FullState::product(ProductStateSpec(oracles::random_angles(rng, n)));
  const double e0 = h.expectation(s).real();
  const auto s0 = sp.evolve(s, 0.0);
  for (std::size_t i = 0; i < s.amplitudes().size(); ++i)
    EXPECT_NEAR(std::abs(s0.amplitudes()[i] - s.amplitudes()[i]), 0.0, 1e-13);
  for (double t : {0.3, 1.7, 6.2}) {
    const auto st = sp.evolve(s, t);
    EXPECT_NEAR(st.norm(), 1.0, 1e-12);
    EXPECT_NEAR(h.expectation(st).real(), e0, 1e-10);
  }
}

TEST(Oracle, MagnetizationConserved) {
  std::mt19937_64 rng(7);
  const int n = 7;
  const Spectrum sp(build_hamiltonian(CouplingProfile::uniform(ChainSpec(n)), 0.0));
  const auto s = FullState::product(ProductStateSpec(oracles::random_angles(rng, n)));
  for (double t : {0.5, 3.0}) EXPECT_NEAR(sigma_z_total(sp.evolve(s, t)), sigma_z_total(s), 1e-10);
}

TEST(Oracle, PartialTraceOfProductState) {
  const auto s = FullState::product(ProductStateSpec({0.0, 0.0, pi, pi}));
  const Mat4c r = ed_rdm_ends_entries(s);
  EXPECT_NEAR(r(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(r.trace() - 1.0), 0.0, 1e-15);
}

TEST(Oracle, TwoSiteSingletIsItsOwnReducedState) {
  const auto s = FullState::bell_pairs(BellPairStateSpec(1));
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_LT(max_abs_diff(ed_rdm_ends_entries(s), oracles::projector({0.0, r, -r, 0.0})), 1e-15);
}

TEST(Oracle, SizeCap) {
  EXPECT_THROW(build_hamiltonian(CouplingProfile::uniform(ChainSpec(15)), 0.0), std::invalid_argument);
  EXPECT_THROW(FullState::product(neel_state(15)), std::invalid_argument);
  EXPECT_THROW(FullState(3, std::vector<cplx>(7)), std::invalid_argument);
}

TEST(Oracle, DimensionMismatch) {
  const Spectrum sp(build_hamiltonian(CouplingProfile::uniform(ChainSpec(4)), 0.0));
  EXPECT_THROW(sp.evolve(FullState::product(neel_state(5)), 1.0), std::invalid_argument);
}
