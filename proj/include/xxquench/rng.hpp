#ifndef XXQUENCH_RNG_HPP
#define XXQUENCH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace xxquench {

/// Portable seeded normal sampler.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. std::normal_distribution is implementation-defined, so normals
/// are drawn here with the Marsaglia polar method from 53-bit uniforms,
/// which gives the same stream on every conforming platform (up to libm's
/// rounding of std::log).
class NormalStream {
public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double standard_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * standard_normal(); }

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed of the independent stream used by disorder realization `r`.
constexpr std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t r) noexcept {
  return seed + r;
}

}  // namespace xxquench

#endif
