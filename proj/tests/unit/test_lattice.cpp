#include <gtest/gtest.h>

#include <cmath>

#include <xxquench/correlator.hpp>
#include <xxquench/lattice.hpp>

using namespace xxquench;

TEST(ChainSpec, RejectsShortChainsAndBadCouplings) {
  EXPECT_THROW(ChainSpec(1), std::invalid_argument);
  EXPECT_THROW(ChainSpec(4, 0.0), std::invalid_argument);
  EXPECT_THROW(ChainSpec(4, -1.0), std::invalid_argument);
  EXPECT_NO_THROW(ChainSpec(2, 0.5));
}

TEST(CouplingProfile, UniformProfile) {
  const auto p = CouplingProfile::uniform(ChainSpec(5, 0.7));
  EXPECT_EQ(p.n_sites(), 5);
  EXPECT_TRUE(p.is_uniform());
  for (int k = 1; k <= 4; ++k) EXPECT_EQ(p.bond(k), 0.7);
  EXPECT_THROW(p.bond(5), std::out_of_range);
}

TEST(CouplingProfile, EqualProfilesHashEqually) {
  CouplingProfile a({1.0, 0.9, 1.1}), b({1.0, 0.9, 1.1}), c({1.0, 1.1, 0.9});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_FALSE(a == c);
}

TEST(CantedState, AnglesGrowLinearly) {
  const auto s = canted_state(5, 0.3);
  for (int k = 1; k <= 5; ++k) EXPECT_DOUBLE_EQ(s.angle(k), (k - 1) * 0.3);
}

TEST(CantedState, AlphaOutsideRangeIsRejected) {
  EXPECT_THROW(canted_state(4, -0.1), std::out_of_range);
  EXPECT_THROW(canted_state(4, 7.0), std::out_of_range);
  EXPECT_NO_THROW(canted_state(4, two_pi));
}

TEST(CantedState, AlphaZeroIsAllUp) {
  const auto s = canted_state(6, 0.0);
  for (int k = 1; k <= 6; ++k) EXPECT_EQ(s.amplitudes(k).first, 1.0);
}

TEST(NeelState, AlternatesUpDown) {
  const auto s = neel_state(6);
  for (int k = 1; k <= 6; ++k) {
    const auto [u, d] = s.amplitudes(k);
    const bool up = k % 2 == 1;
    EXPECT_NEAR(std::abs(u), up ? 1.0 : 0.0, 1e-15);
    EXPECT_NEAR(std::abs(d), up ? 0.0 : 1.0, 1e-15);
  }
}

TEST(ProductState, SigmaZExpectation) {
  const ProductStateSpec s({0.0, pi / 3, pi});
  const Mat2 sz{{1.0, 0.0, 0.0, -1.0}};
  EXPECT_NEAR(s.expectation(1, sz), 1.0, 1e-15);
  EXPECT_NEAR(s.expectation(2, sz), std::cos(pi / 3), 1e-15);
  EXPECT_NEAR(s.expectation(3, sz), -1.0, 1e-15);
}

TEST(ProductState, FlipAppliesSigmaX) {
  const ProductStateSpec s({0.4, 1.3, 5.9});
  const Mat2 sx{{0.0, 1.0, 1.0, 0.0}};
  const Mat2 sz{{1.0, 0.0, 0.0, -1.0}};
  for (int k = 1; k <= 3; ++k) {
    const auto f = flipped_state(s, k);
    EXPECT_NEAR(f.expectation(k, sz), -s.expectation(k, sz), 1e-14);
    EXPECT_NEAR(f.expectation(k, sx), s.expectation(k, sx), 1e-14);
    for (int other = 1; other <= 3; ++other)
      if (other != k) {
        EXPECT_EQ(f.angle(other), s.angle(other));
      }
  }
  EXPECT_THROW(flipped_state(s, 4), std::out_of_range);
}

TEST(BellPairs, RequireEvenN) {
  EXPECT_THROW(BellPairStateSpec::for_sites(7), std::invalid_argument);
  EXPECT_EQ(BellPairStateSpec::for_sites(8).n_pairs(), 4);
  EXPECT_EQ(BellPairStateSpec::partner(1), 2);
  EXPECT_EQ(BellPairStateSpec::partner(4), 3);
}

TEST(Mixture, ValidatesWeights) {
  const auto a = neel_state(4), b = canted_state(4, 0.2);
  EXPECT_THROW(MixtureSpec({{0.5, a}, {0.4, b}}), std::invalid_argument);
  EXPECT_THROW(MixtureSpec({{1.2, a}, {-0.2, b}}), std::invalid_argument);
  EXPECT_THROW(MixtureSpec({{0.5, a}, {0.5, canted_state(5, 0.1)}}), std::invalid_argument);
  const MixtureSpec m({{0.25, a}, {0.75, b}});
  EXPECT_EQ(m.components().size(), 2u);
}

TEST(GaussianCouplings, SeededAndReproducible) {
  const ChainSpec spec(12, 1.0);
  const auto a = gaussian_couplings(spec, 0.1, 99);
  const auto b = gaussian_couplings(spec, 0.1, 99);
  const auto c = gaussian_couplings(spec, 0.1, 100);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  EXPECT_EQ(a.n_sites(), 12);
}

TEST(GaussianCouplings, ZeroDeltaIsUniform) {
  const ChainSpec spec(9, 1.5);
  EXPECT_EQ(gaussian_couplings(spec, 0.0, 1), CouplingProfile::uniform(spec));
  EXPECT_THROW(gaussian_couplings(spec, -0.1, 1), std::invalid_argument);
}

TEST(GaussianCouplings, SpreadMatchesDelta) {
  const ChainSpec spec(20001, 1.0);
  const auto p = gaussian_couplings(spec, 0.2, 5);
  double m = 0.0, v = 0.0;
  for (double b : p.bonds()) m += b;
  m /= static_cast<double>(p.bonds().size());
  for (double b : p.bonds()) v += (b - m) * (b - m);
  v /= static_cast<double>(p.bonds().size());
  EXPECT_NEAR(m, 1.0, 0.01);
  EXPECT_NEAR(std::sqrt(v), 0.2, 0.01);
}
