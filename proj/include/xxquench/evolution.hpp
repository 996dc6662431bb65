#ifndef XXQUENCH_EVOLUTION_HPP
#define XXQUENCH_EVOLUTION_HPP

#include <span>
#include <variant>
#include <vector>

#include "entanglement.hpp"
#include "lattice.hpp"
#include "parallel.hpp"
#include "propagator.hpp"
#include "rdm.hpp"

namespace xxquench {

using InitialState = std::variant<ProductStateSpec, BellPairStateSpec, MixtureSpec>;

inline int n_sites(const InitialState& s) {
  return std::visit([](const auto& v) { return v.n_sites(); }, s);
}

/// rho_{1,N}(t) for any supported initial state; reusable across times.
class RdmEvaluator {
public:
  explicit RdmEvaluator(const InitialState& state) : impl_(make(state)) {}

  TwoSpinDensityMatrix operator()(const Propagator& prop) const {
    return std::visit([&](const auto& e) { return e(prop); }, impl_);
  }

private:
  struct Bell {
    BellPairStateSpec pairs;
    TwoSpinDensityMatrix operator()(const Propagator& p) const { return rdm_bell(pairs, p); }
  };
  using Impl = std::variant<ProductRdmEngine, Bell, MixtureRdmEngine>;

  static Impl make(const InitialState& s) {
    if (const auto* p = std::get_if<ProductStateSpec>(&s)) return ProductRdmEngine(*p);
    if (const auto* b = std::get_if<BellPairStateSpec>(&s)) return Bell{*b};
    return MixtureRdmEngine(std::get<MixtureSpec>(s));
  }

  Impl impl_;
};

/// Entanglement measures at each time of `times`, evaluated in parallel.
inline std::vector<EntanglementReport> measure_series(const InitialState& state, const SpectralPropagator& spectral,
                                                      std::span<const double> times, unsigned workers = 1) {
  if (n_sites(state) != spectral.n_sites())
    throw std::invalid_argument("initial state and couplings describe chains of different length");
  const RdmEvaluator rdm(state);
  std::vector<EntanglementReport> out(times.size());
  parallel_for(times.size(), workers, [&](std::size_t i) { out[i] = measure(rdm(spectral.at(times[i]))); });
  return out;
}

}  // namespace xxquench

#endif
