#ifndef XXQUENCH_DISORDER_HPP
#define XXQUENCH_DISORDER_HPP

// Two robustness ensembles: a random single spin flip in the initial state
// (an incoherent mixture), and Gaussian bond disorder J_k = J (1 + delta_k)
// averaged over seeded realizations.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "entanglement.hpp"
#include "evolution.hpp"
#include "lattice.hpp"
#include "parallel.hpp"
#include "propagator.hpp"
#include "rdm.hpp"

namespace xxquench {

/// rho = (1 - N eps) |base><base| + eps sum_k sigma^x_k |base><base| sigma^x_k.
class FlipEnsemble {
public:
  FlipEnsemble(double epsilon, ProductStateSpec base) : eps_(epsilon), base_(std::move(base)) {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("FlipEnsemble: epsilon must be >= 0");
    if (base_.n_sites() * epsilon > 1.0 + 1e-15)
      throw std::invalid_argument("FlipEnsemble: N * epsilon = " + std::to_string(base_.n_sites() * epsilon) +
                                  " exceeds 1");
  }

  /// From the total flip probability N * eps.
  static FlipEnsemble from_total(double n_epsilon, ProductStateSpec base) {
    const double n = base.n_sites();
    return FlipEnsemble(n_epsilon / n, std::move(base));
  }

  double epsilon() const noexcept { return eps_; }
  double total_probability() const noexcept { return eps_ * base_.n_sites(); }
  const ProductStateSpec& base() const noexcept { return base_; }

private:
  double eps_;
  ProductStateSpec base_;
};

inline MixtureSpec flip_mixture(const FlipEnsemble& ens) {
  const ProductStateSpec& base = ens.base();
  if (ens.epsilon() == 0.0) return MixtureSpec({{1.0, base}});
  const int n = base.n_sites();
  CompensatedSum flipped;
  for (int k = 0; k < n; ++k) flipped.add(ens.epsilon());
  std::vector<MixtureSpec::Component> comps;
  comps.push_back({1.0 - flipped.value(), base});
  for (int k = 1; k <= n; ++k) comps.push_back({ens.epsilon(), flipped_state(base, k)});
  return MixtureSpec(std::move(comps));
}

/// Measures for several total flip probabilities from one set of component
/// RDMs: the N+1 component evolutions are shared by every curve.
inline std::vector<std::vector<EntanglementReport>> flip_disorder_sweep(
    const ProductStateSpec& base, std::span<const double> total_probabilities, const SpectralPropagator& spectral,
    std::span<const double> times, unsigned workers = 1) {
  const int n = base.n_sites();
  if (spectral.n_sites() != n) throw std::invalid_argument("flip_disorder_sweep: dimension mismatch");
  std::vector<ProductRdmEngine> engines;
  engines.emplace_back(base);
  for (int k = 1; k <= n; ++k) engines.emplace_back(flipped_state(base, k));

  std::vector<FlipEnsemble> ensembles;
  for (double p : total_probabilities) ensembles.push_back(FlipEnsemble::from_total(p, base));

  std::vector<std::vector<EntanglementReport>> out(ensembles.size(), std::vector<EntanglementReport>(times.size()));
  parallel_for(times.size(), workers, [&](std::size_t it) {
    const Propagator prop = spectral.at(times[it]);
    std::vector<Mat4c> parts;
    parts.reserve(engines.size());
    for (const auto& e : engines) parts.push_back(e.entries(prop));
    for (std::size_t ie = 0; ie < ensembles.size(); ++ie) {
      const MixtureSpec mix = flip_mixture(ensembles[ie]);
      Mat4c rho;
      const auto comps = mix.components();
      if (comps.size() == 1) {
        rho = parts[0];
      } else {
        for (std::size_t c = 0; c < comps.size(); ++c) rho = rho + comps[c].weight * parts[c];
      }
      out[ie][it] = measure(TwoSpinDensityMatrix(rho, times[it]));
    }
  });
  return out;
}

class CouplingEnsemble {
public:
  CouplingEnsemble(double delta, int realizations, std::uint64_t seed)
      : delta_(delta), realizations_(realizations), seed_(seed) {
    if (!(delta >= 0.0)) throw std::invalid_argument("CouplingEnsemble: delta must be >= 0");
    if (realizations < 1) throw std::invalid_argument("CouplingEnsemble: need at least one realization");
  }

  double delta() const noexcept { return delta_; }
  int realizations() const noexcept { return realizations_; }
  std::uint64_t seed() const noexcept { return seed_; }

private:
  double delta_;
  int realizations_;
  std::uint64_t seed_;
};

struct RealizationResult {
  std::uint64_t seed = 0;
  std::vector<EntanglementReport> reports;  // empty when the realization failed
  std::vector<Mat4c> density_matrices;      // filled when averaging density matrices
  std::optional<std::string> error;
};

struct EnsembleOptions {
  unsigned workers = 1;
  // Also average rho over realizations and report the measures of the mean.
  bool average_density_matrices = false;
};

struct EnsembleResult {
  std::vector<EntanglementReport> mean;                   // averaged measures
  std::vector<EntanglementReport> measures_of_mean_rho;   // only with average_density_matrices
  std::vector<RealizationResult> realizations;

  std::size_t failures() const noexcept {
    std::size_t n = 0;
    for (const auto& r : realizations) n += r.error.has_value();
    return n;
  }
};

/// Arithmetic mean of per-realization measures with compensated summation.
inline std::vector<EntanglementReport> average_reports(std::span<const std::vector<EntanglementReport>> runs) {
  if (runs.empty()) return {};
  const std::size_t nt = runs.front().size();
  std::vector<EntanglementReport> mean(nt);
  for (std::size_t it = 0; it < nt; ++it) {
    CompensatedSum c, f;
    for (const auto& run : runs) {
      c.add(run[it].concurrence);
      f.add(run[it].fef);
    }
    const double count = static_cast<double>(runs.size());
    mean[it].concurrence = c.value() / count;
    mean[it].fef = f.value() / count;
    mean[it].fidelity = teleportation_fidelity(mean[it].fef);
    mean[it].time = runs.front()[it].time;
  }
  return mean;
}

/// Realization r uses couplings from gaussian_couplings(spec, delta,
/// seed + r). Realizations run independently (in parallel when requested);
/// a failed realization is recorded with its error and excluded from the
/// mean, never dropped silently.
inline EnsembleResult ensemble_average(const CouplingEnsemble& ens, const ChainSpec& spec,
                                       const std::variant<BellPairStateSpec, ProductStateSpec>& init,
                                       std::span<const double> times, const EnsembleOptions& opt = {}) {
  const InitialState state = std::visit([](const auto& s) -> InitialState { return s; }, init);
  if (n_sites(state) != spec.n_sites()) throw std::invalid_argument("ensemble_average: dimension mismatch");
  const RdmEvaluator rdm(state);

  EnsembleResult result;
  result.realizations.resize(static_cast<std::size_t>(ens.realizations()));
  parallel_for(result.realizations.size(), opt.workers, [&](std::size_t r) {
    RealizationResult& out = result.realizations[r];
    out.seed = realization_seed(ens.seed(), r);
    try {
      const CouplingProfile profile = gaussian_couplings(spec, ens.delta(), out.seed);
      const SpectralPropagator spectral = SpectralPropagator::for_profile(profile);
      std::vector<EntanglementReport> reports;
      for (double t : times) {
        const TwoSpinDensityMatrix rho = rdm(spectral.at(t));
        reports.push_back(measure(rho));
        if (opt.average_density_matrices) out.density_matrices.push_back(rho.entries());
      }
      out.reports = std::move(reports);
    } catch (const NumericalError& e) {
      out.reports.clear();
      out.density_matrices.clear();
      out.error = e.what();
    }
  });

  std::vector<std::vector<EntanglementReport>> ok;
  for (const auto& r : result.realizations)
    if (!r.error) ok.push_back(r.reports);
  result.mean = average_reports(ok);

  if (opt.average_density_matrices && !ok.empty()) {
    for (std::size_t it = 0; it < times.size(); ++it) {
      Mat4c sum;
      for (std::size_t e = 0; e < 16; ++e) {
        CompensatedSum re, im;
        for (const auto& r : result.realizations) {
          if (r.error) continue;
          re.add(r.density_matrices[it].a[e].real());
          im.add(r.density_matrices[it].a[e].imag());
        }
        sum.a[e] = cplx{re.value(), im.value()} / static_cast<double>(ok.size());
      }
      result.measures_of_mean_rho.push_back(measure(TwoSpinDensityMatrix(sum, times[it])));
    }
  }
  return result;
}

}  // namespace xxquench

#endif
