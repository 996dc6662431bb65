#ifndef XXQUENCH_ANALYSIS_HPP
#define XXQUENCH_ANALYSIS_HPP

// Sweeps over time, canting angle and chain length, plus the derived
// figure-level quantities: first entanglement peak, FWHM in alpha, and the
// growth of the peak time with N.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "entanglement.hpp"
#include "errors.hpp"
#include "evolution.hpp"
#include "lattice.hpp"
#include "parallel.hpp"
#include "propagator.hpp"
#include "rdm.hpp"

namespace xxquench {

class AnalysisError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// `count` evenly spaced points on [start, stop].
struct Axis {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  Axis() = default;
  Axis(double start_, double stop_, int count_) : start(start_), stop(stop_), count(count_) {
    if (count < 1) throw std::invalid_argument("Axis: count must be >= 1");
    if (!std::isfinite(start) || !std::isfinite(stop)) throw std::invalid_argument("Axis: non-finite bound");
    if (count > 1 && !(stop > start)) throw std::invalid_argument("Axis: grid must be strictly increasing");
  }

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    if (count == 1) {
      v[0] = start;
      return v;
    }
    const double step = (stop - start) / (count - 1);
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = start + i * step;
    v.back() = stop;
    return v;
  }
};

/// Reports on a (alpha x t) or (t) grid; alpha empty for pure time sweeps.
/// values[ia * t.size() + it]. Points whose evaluation failed numerically
/// are flagged instead of holding a value.
struct SweepGrid {
  std::vector<double> t;
  std::vector<double> alpha;
  std::vector<EntanglementReport> values;
  std::vector<std::uint8_t> failed;
  std::vector<std::string> errors;  // parallel to `failed`, empty when ok

  std::size_t alpha_count() const noexcept { return alpha.empty() ? 1 : alpha.size(); }
  const EntanglementReport& at(std::size_t ia, std::size_t it) const { return values.at(ia * t.size() + it); }
  bool any_failed() const noexcept {
    for (auto f : failed)
      if (f) return true;
    return false;
  }

  /// Reports of one alpha row (the whole grid for a time sweep).
  std::span<const EntanglementReport> row(std::size_t ia = 0) const {
    return std::span<const EntanglementReport>(values).subspan(ia * t.size(), t.size());
  }
};

namespace detail {

inline void require_increasing(std::span<const double> v, const char* what) {
  if (v.empty()) throw std::invalid_argument(std::string(what) + ": empty grid");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
}

}  // namespace detail

inline SweepGrid time_sweep(const InitialState& state, const SpectralPropagator& spectral,
                            std::span<const double> times, unsigned workers = 1) {
  detail::require_increasing(times, "time_sweep");
  if (n_sites(state) != spectral.n_sites())
    throw std::invalid_argument("time_sweep: state and couplings describe chains of different length");
  const RdmEvaluator rdm(state);
  SweepGrid g;
  g.t.assign(times.begin(), times.end());
  g.values.resize(times.size());
  g.failed.assign(times.size(), 0);
  g.errors.resize(times.size());
  parallel_for(times.size(), workers, [&](std::size_t i) {
    try {
      g.values[i] = measure(rdm(spectral.at(times[i])));
    } catch (const NumericalError& e) {
      g.failed[i] = 1;
      g.errors[i] = e.what();
    }
  });
  return g;
}

/// Concurrence and FEF over the full (alpha, t) grid for canted states on a
/// uniform chain.
inline SweepGrid alpha_map(const ChainSpec& spec, std::span<const double> alphas, std::span<const double> times,
                           unsigned workers = 1) {
  detail::require_increasing(alphas, "alpha_map (alpha)");
  detail::require_increasing(times, "alpha_map (t)");
  const SpectralPropagator spectral = SpectralPropagator::analytic(spec);
  std::vector<Propagator> props;
  props.reserve(times.size());
  for (double t : times) props.push_back(spectral.at(t));

  SweepGrid g;
  g.t.assign(times.begin(), times.end());
  g.alpha.assign(alphas.begin(), alphas.end());
  const std::size_t nt = times.size();
  g.values.resize(alphas.size() * nt);
  g.failed.assign(g.values.size(), 0);
  g.errors.resize(g.values.size());
  parallel_for(alphas.size(), workers, [&](std::size_t ia) {
    const ProductRdmEngine engine(canted_state(spec.n_sites(), alphas[ia]));
    for (std::size_t it = 0; it < nt; ++it) {
      const std::size_t idx = ia * nt + it;
      try {
        g.values[idx] = measure(engine(props[it]));
      } catch (const NumericalError& e) {
        g.failed[idx] = 1;
        g.errors[idx] = e.what();
      }
    }
  });
  return g;
}

struct PeakSummary {
  double t_max = 0.0;
  double f_max = 0.0;
  double c_max = 0.0;
  std::size_t index = 0;         // grid index of the discrete maximum
  bool below_threshold = false;  // no local maximum exceeded the threshold
};

namespace detail {

// Vertex of the parabola through three points; nullopt-like flag when the
// parabola is not concave.
struct Vertex {
  double x;
  bool ok;
};

inline Vertex parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  if (!(curv < 0.0)) return {x1, false};
  const double x = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
  return {std::clamp(x, x0, x2), true};
}

inline double parabola_at(double x, double x0, double y0, double x1, double y1, double x2, double y2) {
  const double l0 = (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
  return y0 * l0 + y1 * l1 + y2 * l2;
}

}  // namespace detail

/// First local maximum of the FEF exceeding `threshold` with t <= t_limit,
/// refined by a parabola through the neighbouring grid points. Without such
/// a maximum the global maximum on the window is returned and flagged.
inline PeakSummary first_peak(std::span<const double> t, std::span<const EntanglementReport> reports,
                              double threshold = 0.5,
                              double t_limit = std::numeric_limits<double>::infinity()) {
  if (t.size() != reports.size() || t.empty()) throw std::invalid_argument("first_peak: size mismatch");
  std::size_t end = 0;
  while (end < t.size() && t[end] <= t_limit) ++end;
  if (end == 0) throw std::invalid_argument("first_peak: no grid point inside the window");

  auto fef = [&](std::size_t i) { return reports[i].fef; };
  std::size_t pick = end;
  for (std::size_t i = 1; i + 1 < end; ++i) {
    if (fef(i) > threshold && fef(i) >= fef(i - 1) && fef(i) >= fef(i + 1)) {
      pick = i;
      break;
    }
  }
  PeakSummary s;
  if (pick == end) {
    s.below_threshold = true;
    pick = 0;
    for (std::size_t i = 1; i < end; ++i)
      if (fef(i) > fef(pick)) pick = i;
    // a maximum exceeding the threshold at the window edge is still a peak
    s.below_threshold = !(fef(pick) > threshold);
  }
  s.index = pick;
  s.t_max = t[pick];
  s.f_max = fef(pick);
  s.c_max = reports[pick].concurrence;
  if (pick > 0 && pick + 1 < end) {
    const double x0 = t[pick - 1], x1 = t[pick], x2 = t[pick + 1];
    const auto v = detail::parabola_vertex(x0, fef(pick - 1), x1, fef(pick), x2, fef(pick + 1));
    if (v.ok) {
      s.t_max = v.x;
      s.f_max = std::max(s.f_max, detail::parabola_at(v.x, x0, fef(pick - 1), x1, fef(pick), x2, fef(pick + 1)));
      s.c_max = std::max(0.0, detail::parabola_at(v.x, x0, reports[pick - 1].concurrence, x1,
                                                  reports[pick].concurrence, x2, reports[pick + 1].concurrence));
    }
  }
  return s;
}

enum class Family { neel, bell_pairs };

inline InitialState family_state(Family f, int n) {
  if (f == Family::neel) return neel_state(n);
  return BellPairStateSpec::for_sites(n);
}

struct ScalingPoint {
  int n_sites;
  PeakSummary peak;
};

struct ScalingOptions {
  double j_scale = 1.0;
  int time_points = 241;  // on [0, N/(2J)]
  unsigned workers = 1;
};

/// For each N: time sweep over [0, N/(2J)], then the refined first peak.
inline std::vector<ScalingPoint> scaling_sweep(std::span<const int> n_list, Family family,
                                               const ScalingOptions& opt = {}) {
  std::vector<ScalingPoint> out;
  for (int n : n_list) {
    if (family == Family::bell_pairs && n % 2 != 0)
      throw std::invalid_argument("scaling_sweep: Bell pairs need even N, got " + std::to_string(n));
    const ChainSpec spec(n, opt.j_scale);
    const double window = n / (2.0 * opt.j_scale);
    const auto times = Axis(0.0, window, opt.time_points).values();
    const SweepGrid g = time_sweep(family_state(family, n), SpectralPropagator::analytic(spec), times, opt.workers);
    if (g.any_failed()) throw NumericalError("scaling_sweep: time sweep failed for N=" + std::to_string(n));
    out.push_back({n, first_peak(g.t, g.row(), 0.5, window)});
  }
  return out;
}

/// Ordinary least-squares slope of y against x.
inline double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: degenerate x values");
  return sxy / sxx;
}

/// Half maximum measured from the curve's minimum over the grid
/// (above_background, the default) or from zero (absolute).
enum class FwhmBaseline { above_background, absolute };
enum class PeakMeasure { fef, concurrence };

struct FwhmResult {
  double width = 0.0;           // above-background FWHM
  double width_absolute = 0.0;  // NaN if the curve never drops to peak/2
  double left = 0.0;
  double right = 0.0;
  double peak = 0.0;
  double baseline = 0.0;
};

namespace detail {

// Bisection for the half-height crossing inside [lo, hi], where the curve is
// >= level at `inside` and < level at the other end.
template <typename Curve>
double bisect_crossing(const Curve& curve, double inside, double outside, double level, double tol) {
  while (std::abs(inside - outside) > tol) {
    const double mid = 0.5 * (inside + outside);
    if (curve(mid) >= level)
      inside = mid;
    else
      outside = mid;
  }
  return 0.5 * (inside + outside);
}

template <typename Curve>
std::pair<double, double> half_width_edges(const Curve& curve, std::span<const double> grid,
                                           std::span<const double> values, std::size_t center, double level,
                                           double tol) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double left = nan, right = nan;
  for (std::size_t i = center; i-- > 0;) {
    if (values[i] < level) {
      left = bisect_crossing(curve, grid[i + 1], grid[i], level, tol);
      break;
    }
  }
  for (std::size_t i = center + 1; i < grid.size(); ++i) {
    if (values[i] < level) {
      right = bisect_crossing(curve, grid[i - 1], grid[i], level, tol);
      break;
    }
  }
  return {left, right};
}

}  // namespace detail

/// FWHM of the peak of `curve` at `center`, scanning the grid outward and
/// locating each half-height crossing by bisection to `tol`.
template <typename Curve>
FwhmResult fwhm_of_curve(const Curve& curve, double center, std::span<const double> grid, double tol = 1e-4) {
  detail::require_increasing(grid, "fwhm");
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = curve(grid[i]);
  std::size_t c = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i] - center) < std::abs(grid[c] - center)) c = i;

  FwhmResult r;
  r.peak = curve(center);
  r.baseline = *std::min_element(values.begin(), values.end());
  if (!(r.peak > r.baseline)) throw AnalysisError("fwhm: no peak above the baseline at the center");
  values[c] = r.peak;
  std::vector<double> g(grid.begin(), grid.end());
  g[c] = center;

  const double level = r.baseline + 0.5 * (r.peak - r.baseline);
  auto [l, rr] = detail::half_width_edges(curve, g, values, c, level, tol);
  r.left = l;
  r.right = rr;
  r.width = rr - l;
  if (std::isnan(r.width)) throw AnalysisError("fwhm: curve does not fall to half height inside the grid");

  auto [la, ra] = detail::half_width_edges(curve, g, values, c, 0.5 * r.peak, tol);
  r.width_absolute = ra - la;
  return r;
}

struct FwhmOptions {
  PeakMeasure measure = PeakMeasure::fef;
  Axis alpha_grid{0.0, two_pi, 201};
  double j_scale = 1.0;
  double tolerance = 1e-4;
};

/// FWHM in alpha of the entanglement peak around the Neel point alpha = pi,
/// at fixed time t_opt.
inline FwhmResult fwhm_alpha(int n, double t_opt, const FwhmOptions& opt = {}) {
  const ChainSpec spec(n, opt.j_scale);
  const Propagator prop = analytic_propagator(spec, t_opt);
  auto curve = [&](double alpha) {
    const EntanglementReport r = measure(ProductRdmEngine(canted_state(n, alpha))(prop));
    return opt.measure == PeakMeasure::fef ? r.fef : r.concurrence;
  };
  const auto grid = opt.alpha_grid.values();
  return fwhm_of_curve(curve, pi, grid, opt.tolerance);
}

}  // namespace xxquench

#endif
