#ifndef XXQUENCH_LATTICE_HPP
#define XXQUENCH_LATTICE_HPP

// Chain geometry, coupling profiles and initial-state descriptions.
// Sites are numbered 1..N in every public interface.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dense.hpp"
#include "rng.hpp"

namespace xxquench {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Chain length N and coupling scale J (times are measured in 1/J).
class ChainSpec {
public:
  explicit ChainSpec(int n_sites, double j_scale = 1.0) : n_(n_sites), j_(j_scale) {
    if (n_sites < 2) throw std::invalid_argument("ChainSpec: need N >= 2, got " + std::to_string(n_sites));
    if (!(j_scale > 0.0) || !std::isfinite(j_scale))
      throw std::invalid_argument("ChainSpec: need J > 0");
  }

  int n_sites() const noexcept { return n_; }
  double j_scale() const noexcept { return j_; }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;

private:
  int n_;
  double j_;
};

/// Per-bond couplings J_1..J_{N-1}.
class CouplingProfile {
public:
  explicit CouplingProfile(std::vector<double> bonds) : bonds_(std::move(bonds)) {
    if (bonds_.empty()) throw std::invalid_argument("CouplingProfile: need at least one bond (N >= 2)");
    for (double b : bonds_)
      if (!std::isfinite(b)) throw std::invalid_argument("CouplingProfile: non-finite coupling");
  }

  static CouplingProfile uniform(const ChainSpec& spec) {
    return CouplingProfile(std::vector<double>(spec.n_sites() - 1, spec.j_scale()));
  }

  int n_sites() const noexcept { return static_cast<int>(bonds_.size()) + 1; }
  std::span<const double> bonds() const noexcept { return bonds_; }

  /// J_k for bond (k, k+1), 1-based.
  double bond(int k) const { return bonds_.at(static_cast<std::size_t>(k - 1)); }

  bool is_uniform() const noexcept {
    for (double b : bonds_)
      if (b != bonds_.front()) return false;
    return true;
  }

  /// Bitwise hash of the bond values; equal profiles hash equally.
  std::size_t hash() const noexcept {
    std::size_t h = std::hash<std::size_t>{}(bonds_.size());
    for (double b : bonds_) {
      const std::size_t v = std::hash<double>{}(b);
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  friend bool operator==(const CouplingProfile&, const CouplingProfile&) = default;

private:
  std::vector<double> bonds_;
};

/// Product state with site k in cos(theta_k/2)|up> + sin(theta_k/2)|down>.
class ProductStateSpec {
public:
  explicit ProductStateSpec(std::vector<double> angles) : angles_(std::move(angles)) {
    if (angles_.size() < 2) throw std::invalid_argument("ProductStateSpec: need N >= 2 sites");
    for (double a : angles_)
      if (!std::isfinite(a)) throw std::invalid_argument("ProductStateSpec: non-finite angle");
  }

  int n_sites() const noexcept { return static_cast<int>(angles_.size()); }
  std::span<const double> angles() const noexcept { return angles_; }
  double angle(int site) const { return angles_.at(static_cast<std::size_t>(site - 1)); }

  /// Amplitudes (up, down) of the single-site state at `site`.
  std::pair<double, double> amplitudes(int site) const {
    const double h = 0.5 * angle(site);
    return {std::cos(h), std::sin(h)};
  }

  /// <psi_k| O |psi_k> for a real 2x2 operator in the (up, down) basis.
  double expectation(int site, const Mat2& op) const {
    const auto [u, d] = amplitudes(site);
    return u * (op(0, 0) * u + op(0, 1) * d) + d * (op(1, 0) * u + op(1, 1) * d);
  }

  friend bool operator==(const ProductStateSpec&, const ProductStateSpec&) = default;

private:
  std::vector<double> angles_;
};

/// Product of normalized singlets on the disjoint pairs (2k-1, 2k).
class BellPairStateSpec {
public:
  explicit BellPairStateSpec(int n_pairs) : pairs_(n_pairs) {
    if (n_pairs < 1) throw std::invalid_argument("BellPairStateSpec: need at least one pair");
  }

  /// Builds the pair product for an N-site chain; N must be even.
  static BellPairStateSpec for_sites(int n_sites) {
    if (n_sites < 2 || n_sites % 2 != 0)
      throw std::invalid_argument("BellPairStateSpec: Bell-pair states need an even N >= 2, got " +
                                  std::to_string(n_sites));
    return BellPairStateSpec(n_sites / 2);
  }

  int n_pairs() const noexcept { return pairs_; }
  int n_sites() const noexcept { return 2 * pairs_; }

  /// Partner site of `site` within its singlet.
  static int partner(int site) noexcept { return site % 2 == 1 ? site + 1 : site - 1; }

  friend bool operator==(const BellPairStateSpec&, const BellPairStateSpec&) = default;

private:
  int pairs_;
};

/// Convex combination of product states. Weights are renormalized to sum
/// to one on construction.
class MixtureSpec {
public:
  struct Component {
    double weight;
    ProductStateSpec state;
  };

  explicit MixtureSpec(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("MixtureSpec: no components");
    const int n = components_.front().state.n_sites();
    CompensatedSum total;
    for (const auto& c : components_) {
      if (!(c.weight >= 0.0)) throw std::invalid_argument("MixtureSpec: negative weight");
      if (c.state.n_sites() != n)
        throw std::invalid_argument("MixtureSpec: components have different chain lengths");
      total.add(c.weight);
    }
    const double sum = total.value();
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("MixtureSpec: weights sum to " + std::to_string(sum) + ", not 1");
    if (sum != 1.0)
      for (auto& c : components_) c.weight /= sum;
  }

  int n_sites() const noexcept { return components_.front().state.n_sites(); }
  std::span<const Component> components() const noexcept { return components_; }

private:
  std::vector<Component> components_;
};

/// theta_k = (k-1) * alpha for k = 1..n.
inline ProductStateSpec canted_state(int n, double alpha) {
  if (n < 2) throw std::invalid_argument("canted_state: need n >= 2");
  if (!(alpha >= 0.0 && alpha <= two_pi))
    throw std::out_of_range("canted_state: alpha must lie in [0, 2pi], got " + std::to_string(alpha));
  std::vector<double> angles(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) angles[static_cast<std::size_t>(k)] = k * alpha;
  return ProductStateSpec(std::move(angles));
}

inline ProductStateSpec neel_state(int n) { return canted_state(n, pi); }

/// Applies sigma^x at `site`: theta -> pi - theta, reduced to [0, 2pi).
inline ProductStateSpec flipped_state(const ProductStateSpec& base, int site) {
  if (site < 1 || site > base.n_sites())
    throw std::out_of_range("flipped_state: site " + std::to_string(site) + " outside 1.." +
                            std::to_string(base.n_sites()));
  std::vector<double> angles(base.angles().begin(), base.angles().end());
  double& a = angles[static_cast<std::size_t>(site - 1)];
  a = std::fmod(pi - a, two_pi);
  if (a < 0.0) a += two_pi;
  return ProductStateSpec(std::move(angles));
}

/// Bonds J_k = J (1 + delta_k), delta_k ~ Normal(0, delta^2), drawn from a
/// NormalStream seeded with `seed`. delta = 0 returns the uniform profile
/// without touching the generator.
inline CouplingProfile gaussian_couplings(const ChainSpec& spec, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("gaussian_couplings: delta must be >= 0");
  if (delta == 0.0) return CouplingProfile::uniform(spec);
  NormalStream rng(seed);
  std::vector<double> bonds(static_cast<std::size_t>(spec.n_sites() - 1));
  for (double& b : bonds) b = spec.j_scale() * (1.0 + rng.normal(0.0, delta));
  return CouplingProfile(std::move(bonds));
}

}  // namespace xxquench

#endif
