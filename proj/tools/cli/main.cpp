#include <functional>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <xxquench/xxquench.hpp>

#include "config.hpp"
#include "runner.hpp"

using xxquench::cli::ConfigError;
using xxquench::cli::json;

namespace {

json load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot read config file " + path);
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "config file " + path + " is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement of the end spins of an XX chain after a quench"};
  app.set_version_flag("--version", XXQUENCH_VERSION);

  std::string command, config_path, state, output, format, measure, baseline;
  int n = 0, realizations = 0, site = 0, points = 0;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  double j = 0, alpha = 0, time = 0;
  bool rho_average = false;
  std::vector<double> angles, t_axis, alpha_axis, flip_probs, deltas, times;
  std::vector<int> n_list;

  app.add_option("command", command, "time-sweep | alpha-map | fwhm | scaling | disorder-flip | "
                                     "disorder-coupling | oracle-check | walk");
  app.add_option("-c,--config", config_path, "JSON run configuration (flags override its values)");
  struct Flag {
    CLI::Option* opt;
    std::string key;
    std::function<json()> value;
  };
  std::vector<Flag> flags;
  auto flag = [&](const std::string& names, auto& var, const std::string& key, const std::string& help) {
    CLI::Option* o = app.add_option(names, var, help);
    flags.push_back({o, key, [&var] { return json(var); }});
    return o;
  };
  flag("-N,--sites", n, "N", "chain length");
  flag("-J,--coupling", j, "J", "coupling scale J > 0");
  flag("--state", state, "state", "neel | canted | bell-pairs | angles");
  flag("--alpha", alpha, "alpha", "canting angle in [0, 2pi]");
  flag("--angles", angles, "angles", "explicit tilt angle per site");
  flag("--t", t_axis, "t", "time grid: start stop count")->expected(3);
  flag("--alpha-grid", alpha_axis, "alpha_grid", "alpha grid: start stop count")->expected(3);
  flag("--N-list", n_list, "N_list", "chain lengths");
  flag("--points", points, "points", "time points per N on [0, N/(2J)]");
  flag("--flip-probs", flip_probs, "flip_probs", "total flip probabilities N*eps");
  flag("--deltas", deltas, "deltas", "coupling disorder strengths");
  flag("--realizations", realizations, "realizations", "disorder realizations R");
  flag("--seed", seed, "seed", "base seed; realization r uses seed + r");
  {
    CLI::Option* o = app.add_flag("--rho-average", rho_average, "also average density matrices");
    flags.push_back({o, "rho_average", [&rho_average] { return json(rho_average); }});
  }
  flag("--site", site, "site", "starting site of the walk");
  flag("--time", time, "time", "single evaluation time");
  flag("--times", times, "times", "evaluation times for oracle-check");
  flag("--measure", measure, "measure", "fef | concurrence");
  flag("--baseline", baseline, "baseline", "above-background | absolute");
  flag("--threads", threads, "threads", "worker threads");
  flag("-o,--output", output, "output", "output data file");
  flag("--format", format, "format", "csv | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    json raw = config_path.empty() ? json::object() : load_file(config_path);
    if (!raw.is_object()) throw ConfigError("", "configuration must be a JSON object");
    if (!command.empty()) raw["command"] = command;
    for (const auto& f : flags) {
      if (f.opt->count() == 0) continue;
      json v = f.value();
      // --t / --alpha-grid take a float list but the count is an integer
      if ((f.key == "t" || f.key == "alpha_grid") && v.size() == 3) {
        const double cnt = v[2].get<double>();
        if (cnt == static_cast<double>(static_cast<long long>(cnt))) v[2] = static_cast<long long>(cnt);
      }
      raw[f.key] = v;
    }
    raw.erase("run_info");
    const auto cfg = xxquench::cli::resolve(raw);
    return xxquench::cli::run(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const xxquench::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 1;
  }
}
