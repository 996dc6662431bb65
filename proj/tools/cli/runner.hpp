#ifndef XXQUENCH_CLI_RUNNER_HPP
#define XXQUENCH_CLI_RUNNER_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <xxquench/xxquench.hpp>

#include "config.hpp"

namespace xxquench::cli {

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// Result of one command: the data table plus a free-form summary that goes
/// to stdout and into the sidecar.
struct Outcome {
  Table table;
  json summary = json::object();
  int exit_code = 0;
};

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
}

inline json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::array();
    for (const auto& c : row) {
      if (const auto* d = std::get_if<double>(&c))
        r.push_back(std::isfinite(*d) ? json(*d) : json(nullptr));
      else if (const auto* i = std::get_if<long long>(&c))
        r.push_back(*i);
      else
        r.push_back(std::get<std::string>(c));
    }
    rows.push_back(std::move(r));
  }
  return {{"columns", t.columns}, {"rows", rows}};
}

inline std::filesystem::path sidecar_path(const std::string& output) {
  std::filesystem::path p(output);
  return p.replace_extension(".meta.json");
}

namespace detail {

inline const std::vector<std::string> report_columns = {"concurrence", "fef", "fidelity", "distillable"};

inline void append_report(std::vector<Cell>& row, const EntanglementReport& r, bool failed = false) {
  if (failed) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.insert(row.end(), {nan, nan, nan, 0LL});
    return;
  }
  row.insert(row.end(), {r.concurrence, r.fef, r.fidelity, static_cast<long long>(r.distillable())});
}

inline std::vector<std::string> with_reports(std::vector<std::string> coords) {
  coords.insert(coords.end(), report_columns.begin(), report_columns.end());
  return coords;
}

inline json peak_json(const PeakSummary& p) {
  return {{"t_max", p.t_max}, {"f_max", p.f_max}, {"c_max", p.c_max}, {"below_threshold", p.below_threshold}};
}

inline int fail_count(const SweepGrid& g) {
  int n = 0;
  for (std::size_t i = 0; i < g.failed.size(); ++i) {
    if (!g.failed[i]) continue;
    if (n == 0) std::cerr << "numerical failure: " << g.errors[i] << '\n';
    ++n;
  }
  return n;
}

}  // namespace detail

inline Outcome run_time_sweep(const RunConfig& c) {
  Outcome o;
  const SweepGrid g = time_sweep(c.initial_state(), SpectralPropagator::analytic(ChainSpec(c.n, c.j)),
                                 c.t.values(), c.threads);
  o.table.columns = detail::with_reports({"t"});
  for (std::size_t i = 0; i < g.t.size(); ++i) {
    std::vector<Cell> row{g.t[i]};
    detail::append_report(row, g.values[i], g.failed[i]);
    o.table.add(std::move(row));
  }
  if (const int failed = detail::fail_count(g)) {
    o.summary["failed_points"] = failed;
    o.exit_code = 1;
    return o;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.t.size(); ++i)
    if (g.values[i].fef > g.values[best].fef) best = i;
  o.summary["max_fef"] = g.values[best].fef;
  o.summary["t_at_max_fef"] = g.t[best];
  o.summary["fidelity_at_max_fef"] = g.values[best].fidelity;
  if (g.t.size() >= 3) o.summary["first_peak"] = detail::peak_json(first_peak(g.t, g.row(), 0.5, g.t.back()));
  return o;
}

inline Outcome run_alpha_map(const RunConfig& c) {
  Outcome o;
  const auto alphas = c.alpha_grid.values();
  const SweepGrid g = alpha_map(ChainSpec(c.n, c.j), alphas, c.t.values(), c.threads);
  o.table.columns = detail::with_reports({"alpha", "t"});
  for (std::size_t ia = 0; ia < g.alpha.size(); ++ia)
    for (std::size_t it = 0; it < g.t.size(); ++it) {
      std::vector<Cell> row{g.alpha[ia], g.t[it]};
      const std::size_t idx = ia * g.t.size() + it;
      detail::append_report(row, g.values[idx], g.failed[idx]);
      o.table.add(std::move(row));
    }
  if (const int failed = detail::fail_count(g)) {
    o.summary["failed_points"] = failed;
    o.exit_code = 1;
  }
  return o;
}

inline Outcome run_fwhm(const RunConfig& c) {
  Outcome o;
  o.table.columns = {"N", "t_opt", "peak", "baseline", "left", "right", "fwhm_above_background", "fwhm_absolute",
                     "fwhm"};
  FwhmOptions opt;
  opt.measure = c.measure == "fef" ? PeakMeasure::fef : PeakMeasure::concurrence;
  opt.alpha_grid = c.alpha_grid;
  opt.j_scale = c.j;
  json widths = json::array();
  for (int n : c.n_list) {
    double t_opt = 0.0;
    if (c.time) {
      t_opt = *c.time;
    } else {
      const int nn = n;
      const ScalingPoint p = scaling_sweep(std::span<const int>(&nn, 1), Family::neel,
                                           {c.j, c.points, c.threads}).front();
      t_opt = p.peak.t_max;
    }
    const FwhmResult r = fwhm_alpha(n, t_opt, opt);
    const double chosen = c.baseline == "absolute" ? r.width_absolute : r.width;
    o.table.add({static_cast<long long>(n), t_opt, r.peak, r.baseline, r.left, r.right, r.width, r.width_absolute,
                 chosen});
    widths.push_back(chosen);
  }
  o.summary["fwhm"] = widths;
  return o;
}

inline Outcome run_scaling(const RunConfig& c) {
  Outcome o;
  const Family fam = c.state == "bell-pairs" ? Family::bell_pairs : Family::neel;
  const auto points = scaling_sweep(c.n_list, fam, {c.j, c.points, c.threads});
  o.table.columns = {"N", "t_max", "f_max", "c_max", "fidelity", "distillable", "below_threshold"};
  std::vector<double> ns, ts;
  for (const auto& p : points) {
    o.table.add({static_cast<long long>(p.n_sites), p.peak.t_max, p.peak.f_max, p.peak.c_max,
                 teleportation_fidelity(p.peak.f_max), static_cast<long long>(p.peak.f_max > 0.5),
                 static_cast<long long>(p.peak.below_threshold)});
    ns.push_back(p.n_sites);
    ts.push_back(p.peak.t_max);
  }
  if (ns.size() >= 2) {
    const double slope = least_squares_slope(ns, ts);
    o.summary["slope_t_max_vs_N"] = slope;
    o.summary["slope_times_4J"] = slope * 4.0 * c.j;
  }
  return o;
}

inline Outcome run_disorder_flip(const RunConfig& c) {
  Outcome o;
  const ProductStateSpec base = c.product_state();
  const auto times = c.t.values();
  const auto curves =
      flip_disorder_sweep(base, c.flip_probs, SpectralPropagator::analytic(ChainSpec(c.n, c.j)), times, c.threads);
  o.table.columns = detail::with_reports({"n_epsilon", "t"});
  json peaks = json::array();
  for (std::size_t e = 0; e < curves.size(); ++e) {
    for (std::size_t it = 0; it < times.size(); ++it) {
      std::vector<Cell> row{c.flip_probs[e], times[it]};
      detail::append_report(row, curves[e][it]);
      o.table.add(std::move(row));
    }
    if (times.size() >= 3) peaks.push_back(detail::peak_json(first_peak(times, curves[e], 0.5, times.back())));
  }
  o.summary["first_peaks"] = peaks;
  return o;
}

inline Outcome run_disorder_coupling(const RunConfig& c) {
  Outcome o;
  const ChainSpec spec(c.n, c.j);
  std::variant<BellPairStateSpec, ProductStateSpec> init = BellPairStateSpec::for_sites(2);
  if (c.state == "bell-pairs")
    init = BellPairStateSpec::for_sites(c.n);
  else
    init = c.product_state();
  const auto times = c.t.values();
  o.table.columns = detail::with_reports({"delta", "t"});
  if (c.rho_average) {
    o.table.columns.push_back("concurrence_of_mean_rho");
    o.table.columns.push_back("fef_of_mean_rho");
  }
  json failures = json::array();
  json peaks = json::array();
  for (double delta : c.deltas) {
    const EnsembleResult res =
        ensemble_average(CouplingEnsemble(delta, c.realizations, c.seed), spec, init, times,
                         {c.threads, c.rho_average});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t it = 0; it < times.size(); ++it) {
      std::vector<Cell> row{delta, times[it]};
      const bool none = res.mean.empty();
      detail::append_report(row, none ? EntanglementReport{} : res.mean[it], none);
      if (c.rho_average) {
        const bool have = it < res.measures_of_mean_rho.size();
        row.push_back(have ? res.measures_of_mean_rho[it].concurrence : nan);
        row.push_back(have ? res.measures_of_mean_rho[it].fef : nan);
      }
      o.table.add(std::move(row));
    }
    for (const auto& r : res.realizations) {
      if (!r.error) continue;
      std::cerr << "realization with seed " << r.seed << " at delta " << delta << " failed: " << *r.error << '\n';
      failures.push_back({{"delta", delta}, {"seed", r.seed}, {"error", *r.error}});
    }
    if (!res.mean.empty() && times.size() >= 3)
      peaks.push_back(detail::peak_json(first_peak(times, res.mean, 0.5, times.back())));
  }
  o.summary["failed_realizations"] = failures;
  o.summary["first_peaks"] = peaks;
  if (!failures.empty()) o.exit_code = 1;
  return o;
}

inline Outcome run_oracle_check(const RunConfig& c) {
  Outcome o;
  o.table.columns = {"state", "t", "max_deviation"};
  const ChainSpec spec(c.n, c.j);
  const CouplingProfile profile = CouplingProfile::uniform(spec);
  const ed::Spectrum spectrum(ed::build_hamiltonian(profile, 0.0));

  struct Case {
    std::string label;
    InitialState state;
    ed::FullState full;
  };
  std::vector<Case> cases;
  auto add_product = [&](const std::string& label, const ProductStateSpec& s) {
    cases.push_back({label, s, ed::FullState::product(s)});
  };
  add_product("neel", neel_state(c.n));
  for (double a : {0.3, pi / 2, pi, 4.0}) add_product("canted:" + format_double(a), canted_state(c.n, a));
  NormalStream rng(c.seed);
  std::vector<double> angles(static_cast<std::size_t>(c.n));
  for (double& a : angles) a = two_pi * rng.uniform();
  add_product("angles:seed=" + std::to_string(c.seed), ProductStateSpec(angles));
  if (c.n % 2 == 0) {
    const auto pairs = BellPairStateSpec::for_sites(c.n);
    cases.push_back({"bell-pairs", pairs, ed::FullState::bell_pairs(pairs)});
  }

  const SpectralPropagator spectral = SpectralPropagator::analytic(spec);
  double worst = 0.0;
  for (const auto& cs : cases) {
    const RdmEvaluator engine(cs.state);
    for (double t : c.times) {
      const Mat4c a = engine(spectral.at(t)).entries();
      const Mat4c b = ed::ed_rdm_ends_entries(spectrum.evolve(cs.full, t));
      const double dev = max_abs_diff(a, b);
      worst = std::max(worst, dev);
      o.table.add({cs.label, t, dev});
    }
  }
  o.summary["max_deviation"] = worst;
  o.summary["threshold"] = 1e-8;
  o.exit_code = worst < 1e-8 ? 0 : 1;
  return o;
}

inline Outcome run_walk(const RunConfig& c) {
  Outcome o;
  const Propagator prop = analytic_propagator(ChainSpec(c.n, c.j), *c.time);
  const auto p = walk_distribution(prop, c.site);
  o.table.columns = {"l", "probability"};
  CompensatedSum total;
  for (std::size_t l = 0; l < p.size(); ++l) {
    o.table.add({static_cast<long long>(l + 1), p[l]});
    total.add(p[l]);
  }
  o.summary["total_probability"] = total.value();
  return o;
}

inline Outcome dispatch(const RunConfig& c) {
  switch (c.command) {
    case Command::time_sweep: return run_time_sweep(c);
    case Command::alpha_map: return run_alpha_map(c);
    case Command::fwhm: return run_fwhm(c);
    case Command::scaling: return run_scaling(c);
    case Command::disorder_flip: return run_disorder_flip(c);
    case Command::disorder_coupling: return run_disorder_coupling(c);
    case Command::oracle_check: return run_oracle_check(c);
    case Command::walk: return run_walk(c);
  }
  throw std::logic_error("unhandled command");
}

inline std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Runs the command, writes the data file and its sidecar, returns the exit
/// code. Numerical failures inside the command propagate as exceptions.
inline int run(const RunConfig& c) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = dispatch(c);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  {
    std::ofstream f(c.output);
    if (!f) throw std::runtime_error("cannot open output file " + c.output);
    if (c.format == "csv")
      write_csv(f, o.table);
    else
      f << table_json(o.table).dump(1) << '\n';
    if (!f) throw std::runtime_error("failed writing " + c.output);
  }

  json meta = c.resolved;
  json info = {{"version", XXQUENCH_VERSION},
               {"started_utc", started},
               {"elapsed_seconds", elapsed},
               {"rows", o.table.rows.size()},
               {"exit_code", o.exit_code},
               {"summary", o.summary}};
  if (c.resolved.contains("seed")) {
    info["seed_drawn_from_entropy"] = c.seed_drawn;
    const auto seeds = c.seeds();
    if (!seeds.empty()) info["realization_seeds"] = seeds;
  }
  meta["run_info"] = info;
  const auto side = sidecar_path(c.output);
  std::ofstream s(side);
  if (!s) throw std::runtime_error("cannot open sidecar " + side.string());
  s << meta.dump(2) << '\n';

  std::cout << c.command_name << ": wrote " << o.table.rows.size() << " rows to " << c.output << " ("
            << side.string() << ")\n";
  for (const auto& [k, v] : o.summary.items()) std::cout << "  " << k << " = " << v.dump() << '\n';
  return o.exit_code;
}

}  // namespace xxquench::cli

#endif
