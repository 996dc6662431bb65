#ifndef XXQUENCH_CLI_CONFIG_HPP
#define XXQUENCH_CLI_CONFIG_HPP

// Run configuration: a flat JSON object, validated per command. Every default
// is filled in, so the resolved object can be re-fed verbatim.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include <xxquench/xxquench.hpp>

namespace xxquench::cli {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& key, const std::string& msg)
      : std::runtime_error(key.empty() ? msg : "config key '" + key + "': " + msg) {}
};

enum class Command { time_sweep, alpha_map, fwhm, scaling, disorder_flip, disorder_coupling, oracle_check, walk };

inline const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> m = {
      {"time-sweep", Command::time_sweep},       {"alpha-map", Command::alpha_map},
      {"fwhm", Command::fwhm},                   {"scaling", Command::scaling},
      {"disorder-flip", Command::disorder_flip}, {"disorder-coupling", Command::disorder_coupling},
      {"oracle-check", Command::oracle_check},   {"walk", Command::walk},
  };
  return m;
}

struct RunConfig {
  Command command = Command::time_sweep;
  std::string command_name;
  int n = 24;
  double j = 1.0;
  std::string state = "neel";
  double alpha = pi;
  std::vector<double> angles;
  Axis t;
  Axis alpha_grid;
  std::vector<double> times;
  std::vector<int> n_list;
  std::vector<double> flip_probs;
  std::vector<double> deltas;
  int realizations = 100;
  std::uint64_t seed = 0;
  bool seed_drawn = false;
  bool rho_average = false;
  int site = 1;
  std::optional<double> time;
  int points = 241;
  std::string measure = "fef";
  std::string baseline = "above-background";
  unsigned threads = 1;
  std::string output;
  std::string format = "csv";

  /// Fully resolved configuration, as written to the sidecar.
  json resolved;

  std::vector<std::uint64_t> seeds() const {
    if (command != Command::disorder_coupling) return {};
    std::vector<std::uint64_t> s;
    for (int r = 0; r < realizations; ++r) s.push_back(realization_seed(seed, static_cast<std::uint64_t>(r)));
    return s;
  }

  InitialState initial_state() const {
    if (state == "bell-pairs") return BellPairStateSpec::for_sites(n);
    return product_state();
  }

  ProductStateSpec product_state() const {
    if (state == "neel") return neel_state(n);
    if (state == "canted") return canted_state(n, alpha);
    if (state == "angles") return ProductStateSpec(angles);
    throw ConfigError("state", "'" + state + "' is not a product state");
  }
};

namespace detail {

inline constexpr int max_sites = 4096;

inline std::set<std::string> keys_for(Command c) {
  std::set<std::string> k = {"schema", "command", "threads", "output", "format", "run_info"};
  auto add = [&](std::initializer_list<const char*> more) { k.insert(more.begin(), more.end()); };
  switch (c) {
    case Command::time_sweep: add({"N", "J", "state", "alpha", "angles", "t"}); break;
    case Command::alpha_map: add({"N", "J", "t", "alpha_grid"}); break;
    case Command::fwhm: add({"N_list", "J", "time", "alpha_grid", "measure", "baseline", "points"}); break;
    case Command::scaling: add({"N_list", "J", "state", "points"}); break;
    case Command::disorder_flip: add({"N", "J", "state", "alpha", "angles", "flip_probs", "t"}); break;
    case Command::disorder_coupling:
      add({"N", "J", "state", "alpha", "angles", "deltas", "realizations", "seed", "rho_average", "t"});
      break;
    case Command::oracle_check: add({"N", "J", "times", "seed"}); break;
    case Command::walk: add({"N", "J", "site", "time"}); break;
  }
  return k;
}

class Reader {
public:
  explicit Reader(const json& j) : j_(j) {}

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  double real(const std::string& key, double lo, double hi, const std::string& range) const {
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(key, "expected a number in " + range);
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi)
      throw ConfigError(key, "value " + v.dump() + " outside the admissible range " + range);
    return x;
  }

  long long integer(const std::string& key, long long lo, long long hi) const {
    const json& v = j_.at(key);
    const std::string range = "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer in " + range);
    const long long x = v.get<long long>();
    if (x < lo || x > hi) throw ConfigError(key, "value " + v.dump() + " outside the admissible range " + range);
    return x;
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> allowed) const {
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : " | ") + std::string(a);
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(key, "expected one of " + list);
    const std::string s = v.get<std::string>();
    for (const char* a : allowed)
      if (s == a) return s;
    throw ConfigError(key, "'" + s + "' is not one of " + list);
  }

  std::vector<double> reals(const std::string& key, double lo, double hi, const std::string& range) const {
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(key, "expected a non-empty list of numbers in " + range);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string path = key + "[" + std::to_string(i) + "]";
      if (!v[i].is_number()) throw ConfigError(path, "expected a number in " + range);
      const double x = v[i].get<double>();
      if (!std::isfinite(x) || x < lo || x > hi)
        throw ConfigError(path, "value " + v[i].dump() + " outside the admissible range " + range);
      out.push_back(x);
    }
    return out;
  }

  Axis axis(const std::string& key, double lo, double hi, const std::string& range) const {
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number_integer())
      throw ConfigError(key, "expected [start, stop, count] with start, stop in " + range + " and count >= 1");
    const double a = v[0].get<double>(), b = v[1].get<double>();
    const long long n = v[2].get<long long>();
    if (!std::isfinite(a) || !std::isfinite(b) || a < lo || b > hi)
      throw ConfigError(key, "bounds outside the admissible range " + range);
    if (n < 1 || n > 1000000) throw ConfigError(key, "count must lie in [1, 1000000]");
    if (n > 1 && !(b > a)) throw ConfigError(key, "grid must be strictly increasing (stop > start)");
    return Axis(a, b, static_cast<int>(n));
  }

private:
  const json& j_;
};

inline json axis_json(const Axis& a) { return json::array({a.start, a.stop, a.count}); }

}  // namespace detail

/// Validates `raw` and fills in every default. Throws ConfigError.
inline RunConfig resolve(const json& raw) {
  if (!raw.is_object()) throw ConfigError("", "configuration must be a JSON object");
  detail::Reader in(raw);
  RunConfig c;
  json& out = c.resolved;

  if (in.has("schema") && in.integer("schema", 1, 1) != 1) throw ConfigError("schema", "only schema 1 is known");
  out["schema"] = 1;

  if (!in.has("command")) throw ConfigError("command", "missing; expected one of the eight commands");
  c.command_name = in.choice("command", {"time-sweep", "alpha-map", "fwhm", "scaling", "disorder-flip",
                                         "disorder-coupling", "oracle-check", "walk"});
  c.command = command_names().at(c.command_name);
  out["command"] = c.command_name;

  const auto allowed = detail::keys_for(c.command);
  for (const auto& [key, value] : raw.items())
    if (!allowed.count(key)) throw ConfigError(key, "unknown key for command " + c.command_name);

  c.j = in.has("J") ? in.real("J", 1e-12, 1e12, "(0, 1e12]") : 1.0;
  out["J"] = c.j;

  const bool uses_n = allowed.count("N") > 0;
  if (uses_n) {
    const int cap = c.command == Command::oracle_check ? ed::max_sites : detail::max_sites;
    c.n = in.has("N") ? static_cast<int>(in.integer("N", 2, cap)) : (c.command == Command::oracle_check ? 8 : 24);
    out["N"] = c.n;
  }

  if (allowed.count("state")) {
    const bool product_only = c.command == Command::disorder_flip;
    const char* fallback = c.command == Command::disorder_coupling ? "bell-pairs" : "neel";
    if (c.command == Command::scaling)
      c.state = in.has("state") ? in.choice("state", {"neel", "bell-pairs"}) : fallback;
    else if (product_only)
      c.state = in.has("state") ? in.choice("state", {"neel", "canted", "angles"}) : fallback;
    else
      c.state = in.has("state") ? in.choice("state", {"neel", "canted", "bell-pairs", "angles"}) : fallback;
    out["state"] = c.state;

    if (c.state == "canted") {
      c.alpha = in.has("alpha") ? in.real("alpha", 0.0, two_pi, "[0, 2pi]") : pi;
      out["alpha"] = c.alpha;
    } else if (in.has("alpha")) {
      throw ConfigError("alpha", "only applies to state 'canted'");
    }
    if (c.state == "angles") {
      if (!in.has("angles")) throw ConfigError("angles", "required for state 'angles'");
      c.angles = in.reals("angles", -1e6, 1e6, "finite reals");
      if (static_cast<int>(c.angles.size()) != c.n)
        throw ConfigError("angles", "needs exactly N = " + std::to_string(c.n) + " entries, got " +
                                        std::to_string(c.angles.size()));
      out["angles"] = c.angles;
    } else if (in.has("angles")) {
      throw ConfigError("angles", "only applies to state 'angles'");
    }
    if (c.state == "bell-pairs" && uses_n && c.n % 2 != 0)
      throw ConfigError("N", "state 'bell-pairs' requires an even N, got " + std::to_string(c.n));
  }

  if (allowed.count("t")) {
    const double window = c.n / (2.0 * c.j);
    c.t = in.has("t") ? in.axis("t", 0.0, 1e9, "[0, 1e9]") : Axis(0.0, window, 241);
    out["t"] = detail::axis_json(c.t);
  }

  if (allowed.count("alpha_grid")) {
    c.alpha_grid = in.has("alpha_grid") ? in.axis("alpha_grid", 0.0, two_pi, "[0, 2pi]") : Axis(0.0, two_pi, 201);
    out["alpha_grid"] = detail::axis_json(c.alpha_grid);
  }

  if (allowed.count("N_list")) {
    const std::vector<int> fallback = c.command == Command::fwhm ? std::vector<int>{16, 24, 32, 40, 50}
                                                                 : std::vector<int>{16, 24, 32, 40, 50, 60};
    if (in.has("N_list")) {
      const json& v = raw.at("N_list");
      if (!v.is_array() || v.empty()) throw ConfigError("N_list", "expected a non-empty list of integers in [2, 4096]");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string path = "N_list[" + std::to_string(i) + "]";
        if (!v[i].is_number_integer() || v[i].get<long long>() < 2 || v[i].get<long long>() > detail::max_sites)
          throw ConfigError(path, "expected an integer in [2, 4096]");
        c.n_list.push_back(v[i].get<int>());
        if (c.state == "bell-pairs" && c.n_list.back() % 2 != 0)
          throw ConfigError(path, "state 'bell-pairs' requires an even N, got " + v[i].dump());
      }
    } else {
      c.n_list = fallback;
    }
    out["N_list"] = c.n_list;
  }

  if (allowed.count("points")) {
    c.points = in.has("points") ? static_cast<int>(in.integer("points", 3, 1000000)) : 241;
    out["points"] = c.points;
  }

  if (allowed.count("measure")) {
    c.measure = in.has("measure") ? in.choice("measure", {"fef", "concurrence"}) : "fef";
    out["measure"] = c.measure;
  }
  if (allowed.count("baseline")) {
    c.baseline = in.has("baseline") ? in.choice("baseline", {"above-background", "absolute"}) : "above-background";
    out["baseline"] = c.baseline;
  }

  if (allowed.count("flip_probs")) {
    c.flip_probs = in.has("flip_probs") ? in.reals("flip_probs", 0.0, 1.0, "[0, 1]")
                                        : std::vector<double>{0.0, 0.05, 0.10, 0.15};
    out["flip_probs"] = c.flip_probs;
  }

  if (allowed.count("deltas")) {
    c.deltas = in.has("deltas") ? in.reals("deltas", 0.0, 1.0, "[0, 1]") : std::vector<double>{0.0, 0.1, 0.2};
    out["deltas"] = c.deltas;
    c.realizations = in.has("realizations") ? static_cast<int>(in.integer("realizations", 1, 1000000)) : 100;
    out["realizations"] = c.realizations;
    c.rho_average = false;
    if (in.has("rho_average")) {
      if (!raw.at("rho_average").is_boolean()) throw ConfigError("rho_average", "expected true or false");
      c.rho_average = raw.at("rho_average").get<bool>();
    }
    out["rho_average"] = c.rho_average;
  }

  if (allowed.count("seed")) {
    if (in.has("seed")) {
      const json& v = raw.at("seed");
      if (!v.is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer in [0, 2^64)");
      c.seed = v.get<std::uint64_t>();
    } else {
      std::random_device rd;
      c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      c.seed_drawn = true;
    }
    out["seed"] = c.seed;
  }

  if (allowed.count("times")) {
    c.times = in.has("times") ? in.reals("times", 0.0, 1e9, "[0, 1e9]") : std::vector<double>{0.4, 1.1, 2.7};
    out["times"] = c.times;
  }

  if (allowed.count("site")) {
    c.site = in.has("site") ? static_cast<int>(in.integer("site", 1, c.n)) : (c.n + 1) / 2;
    out["site"] = c.site;
  }

  if (allowed.count("time")) {
    if (in.has("time")) {
      c.time = in.real("time", 0.0, 1e9, "[0, 1e9]");
      out["time"] = *c.time;
    } else if (c.command == Command::walk) {
      c.time = c.n / (4.0 * c.j);
      out["time"] = *c.time;
    }
  }

  c.threads = in.has("threads") ? static_cast<unsigned>(in.integer("threads", 1, 1024)) : default_workers();
  out["threads"] = c.threads;
  c.format = in.has("format") ? in.choice("format", {"csv", "json"}) : "csv";
  out["format"] = c.format;
  if (in.has("output")) {
    if (!raw.at("output").is_string() || raw.at("output").get<std::string>().empty())
      throw ConfigError("output", "expected a non-empty file path");
    c.output = raw.at("output").get<std::string>();
  } else {
    c.output = c.command_name + "." + c.format;
  }
  out["output"] = c.output;
  return c;
}

}  // namespace xxquench::cli

#endif
