#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>

#include <xxquench/propagator.hpp>

#include "support/oracles.hpp"

using namespace xxquench;

namespace {

double unitarity_defect(const Propagator& p) {
  const int n = p.n_sites();
  double worst = 0.0;
  for (int k = 1; k <= n; ++k)
    for (int kp = 1; kp <= n; ++kp) {
      cplx s{};
      for (int l = 1; l <= n; ++l) s += p(k, l) * std::conj(p(kp, l));
      worst = std::max(worst, std::abs(s - (k == kp ? 1.0 : 0.0)));
    }
  return worst;
}

double max_diff(const Matrix<cplx>& a, const Matrix<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

CouplingProfile random_profile(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> b(static_cast<std::size_t>(n - 1));
  for (double& x : b) x = u(rng);
  return CouplingProfile(b);
}

}  // namespace

TEST(Propagator, IdentityAtTimeZero) {
  for (int n : {2, 5, 17}) {
    const auto p = analytic_propagator(ChainSpec(n, 1.3), 0.0);
    for (int k = 1; k <= n; ++k)
      for (int l = 1; l <= n; ++l) EXPECT_NEAR(std::abs(p(k, l) - (k == l ? 1.0 : 0.0)), 0.0, 1e-14);
  }
}

TEST(Propagator, TwoSiteClosedForm) {
  for (double t : {0.3, 1.0, 2.2, 7.9}) {
    const auto p = analytic_propagator(ChainSpec(2), t);
    EXPECT_NEAR(std::abs(p(1, 1) - cplx{std::cos(t), 0.0}), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(p(1, 2) - cplx{0.0, -std::sin(t)}), 0.0, 1e-14);
  }
}

TEST(Propagator, UnitaryAndSymmetricForLongChain) {
  const auto p = analytic_propagator(ChainSpec(50), 12.5);
  EXPECT_LT(unitarity_defect(p), 1e-10);
  for (int k = 1; k <= 50; ++k) {
    double row = 0.0;
    for (int l = 1; l <= 50; ++l) {
      row += std::norm(p(k, l));
      EXPECT_EQ(p(k, l), p(l, k));
    }
    EXPECT_NEAR(row, 1.0, 1e-10);
  }
}

TEST(Propagator, AnalyticMatchesMatrixExponential) {
  for (int n : {3, 8, 21}) {
    const ChainSpec spec(n, 0.8);
    const auto a = oracles::hopping_matrix(CouplingProfile::uniform(spec));
    for (double t : {0.5, 3.0, 11.0}) {
      EXPECT_LT(max_diff(analytic_propagator(spec, t).amplitudes(), oracles::expm_minus_i(a, t)), 1e-10);
    }
  }
}

TEST(Propagator, NumericMatchesMatrixExponentialForDisorder) {
  std::mt19937_64 rng(17);
  for (int n : {4, 9, 30}) {
    const auto prof = random_profile(rng, n);
    const auto a = oracles::hopping_matrix(prof);
    for (double t : {0.7, 4.1}) {
      const auto p = numeric_propagator(prof, t);
      EXPECT_LT(max_diff(p.amplitudes(), oracles::expm_minus_i(a, t)), 1e-10);
      EXPECT_LT(unitarity_defect(p), 1e-10);
    }
  }
}

TEST(Propagator, NumericEqualsAnalyticOnUniformProfile) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> nn(2, 64);
  std::uniform_real_distribution<double> tt(0.0, 50.0);
  for (int trial = 0; trial < 12; ++trial) {
    const ChainSpec spec(nn(rng), 1.0);
    const double t = tt(rng);
    const auto a = analytic_propagator(spec, t);
    const auto b = numeric_propagator(CouplingProfile::uniform(spec), t);
    EXPECT_LT(max_diff(a.amplitudes(), b.amplitudes()), 1e-9) << "N=" << spec.n_sites() << " t=" << t;
  }
}

TEST(Propagator, DecoupledSiteStaysPut) {
  const CouplingProfile prof({1.0, 0.0});
  for (double t : {0.0, 1.3, 9.0}) {
    const auto p = numeric_propagator(prof, t);
    EXPECT_NEAR(std::abs(p(3, 3) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p(3, 1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(p(3, 2)), 0.0, 1e-12);
  }
}

TEST(Propagator, GroupProperty) {
  std::mt19937_64 rng(31);
  const auto prof = random_profile(rng, 12);
  const auto sp = SpectralPropagator::numeric(prof);
  const auto prod = sp.at(1.3).amplitudes() * sp.at(2.4).amplitudes();
  EXPECT_LT(max_diff(prod, sp.at(3.7).amplitudes()), 1e-9);
}

TEST(Propagator, NegativeTimeIsAdjoint) {
  const auto sp = SpectralPropagator::analytic(ChainSpec(7));
  const auto f = sp.at(2.1), g = sp.at(-2.1);
  for (int k = 1; k <= 7; ++k)
    for (int l = 1; l <= 7; ++l) EXPECT_NEAR(std::abs(g(k, l) - std::conj(f(l, k))), 0.0, 1e-13);
}

TEST(Propagator, UniformSpectrumIsCosineBand) {
  for (int n : {5, 12}) {
    const auto sp = SpectralPropagator::numeric(CouplingProfile::uniform(ChainSpec(n, 1.0)));
    std::vector<double> expected;
    for (int m = 1; m <= n; ++m) expected.push_back(2.0 * std::cos(pi * m / (n + 1)));
    std::sort(expected.begin(), expected.end());
    for (int m = 0; m < n; ++m) EXPECT_NEAR(sp.energies()[static_cast<std::size_t>(m)], expected[m], 1e-10);
  }
}

TEST(Propagator, BesselAsymptoticsInTheBulk) {
  const auto p = analytic_propagator(ChainSpec(201), 20.0);
  for (int d = -30; d <= 30; ++d) {
    const double exact = std::abs(p(101, 101 + d));
    const double bessel = std::abs(std::cyl_bessel_j(std::abs(d), 40.0));
    EXPECT_NEAR(exact, bessel, 5e-3) << "d=" << d;
  }
  // phase convention (-i)^d, matching the two-site solution at small t
  const auto q = analytic_propagator(ChainSpec(201), 0.05);
  for (int d = 0; d <= 3; ++d) EXPECT_NEAR(std::abs(q(101, 101 + d) - bessel_amplitude(101, 101 + d, 1.0, 0.05)), 0.0, 1e-12);
}

TEST(WalkDistribution, PointMassAtTimeZeroAndNormalized) {
  const auto p0 = walk_distribution(analytic_propagator(ChainSpec(9), 0.0), 4);
  for (int l = 0; l < 9; ++l) EXPECT_NEAR(p0[static_cast<std::size_t>(l)], l == 3 ? 1.0 : 0.0, 1e-14);
  const auto p = walk_distribution(analytic_propagator(ChainSpec(13), 3.25), 7);
  double s = 0.0;
  for (double x : p) s += x;
  EXPECT_NEAR(s, 1.0, 1e-10);
  EXPECT_THROW(walk_distribution(analytic_propagator(ChainSpec(13), 1.0), 14), std::out_of_range);
}

TEST(WalkDistribution, CentralStartIsReflectionSymmetric) {
  for (double t : {0.9, 3.25, 5.5}) {
    const auto p = walk_distribution(analytic_propagator(ChainSpec(13), t), 7);
    for (int l = 1; l <= 13; ++l)
      EXPECT_NEAR(p[static_cast<std::size_t>(l - 1)], p[static_cast<std::size_t>(13 - l)], 1e-12);
  }
}

// The end-site probabilities of the N=13 walk at t = N/4: values frozen from
// an independent dense-exponential scan. The ends are first reached close
// to this time; the larger maximum on [0, 6] comes later, near t = 4.1.
TEST(WalkDistribution, ThirteenSiteEndProbabilities) {
  const auto a = oracles::hopping_matrix(CouplingProfile::uniform(ChainSpec(13)));
  const auto ref = oracles::expm_minus_i(a, 3.25);
  const auto p = walk_distribution(analytic_propagator(ChainSpec(13), 3.25), 7);
  EXPECT_NEAR(p[0], std::norm(ref(6, 0)), 1e-12);
  EXPECT_NEAR(p[0], p[12], 1e-12);
  EXPECT_NEAR(p[0], 0.1505, 5e-4);
  double best = 0.0, t_best = 0.0;
  for (int i = 0; i <= 600; ++i) {
    const double t = 0.01 * i;
    const double v = walk_distribution(analytic_propagator(ChainSpec(13), t), 7)[0];
    if (v > best) {
      best = v;
      t_best = t;
    }
  }
  EXPECT_NEAR(t_best, 4.1, 0.1);
  EXPECT_NEAR(best, 0.318, 2e-3);
}

TEST(PropagatorCache, DecomposesEachProfileOnce) {
  PropagatorCache cache;
  const auto a = CouplingProfile({1.0, 0.9, 1.2});
  const auto b = CouplingProfile({1.0, 0.9, 1.3});
  std::vector<std::thread> pool;
  std::vector<std::shared_ptr<const SpectralPropagator>> got(8);
  for (int i = 0; i < 8; ++i) pool.emplace_back([&, i] { got[i] = cache.get(i % 2 ? a : b); });
  for (auto& t : pool) t.join();
  EXPECT_EQ(cache.size(), 2u);
  for (int i = 2; i < 8; ++i) EXPECT_EQ(got[i].get(), got[i % 2].get());
}
