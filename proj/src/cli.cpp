#include "pmrecycle/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "pmrecycle/analysis.hpp"
#include "pmrecycle/chain.hpp"
#include "pmrecycle/errors.hpp"
#include "pmrecycle/experiment.hpp"
#include "pmrecycle/io.hpp"
#include "pmrecycle/quantum_core.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pmrecycle::cli {

namespace {

double parse_double(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(fmt::format("'{}' is not a number", text));
  }
  return value;
}

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string config_path;
  bool json = false;
  std::string out;
  bool quiet = false;
};

struct Context {
  GlobalOptions global;
  std::ostream& out;
  std::ostream& err;

  void note(const std::string& line) const {
    if (!global.quiet) out << line << '\n';
  }
};

// ---------------------------------------------------------------------------
// verify

std::vector<InvariantCheck> verify_all(const SquareOperators& square) {
  auto checks = check_square(square);
  const ComplexMatrix identity = ComplexMatrix::Identity(kDim, kDim);

  auto guarded = [&](const std::string& name, const std::function<InvariantCheck()>& body) {
    try {
      checks.push_back(body());
    } catch (const std::exception& e) {
      checks.push_back({name, false, e.what()});
    }
  };

  std::vector<TripleState> states;
  guarded("orthonormal bases", [&] {
    states = all_triple_states(square);
    double worst = 0.0;
    for (int j = 1; j <= kNumContexts; ++j) {
      ComplexMatrix sum = ComplexMatrix::Zero(kDim, kDim);
      for (int i = 1; i <= kSlotsPerContext; ++i) sum += states[flat_index(j, i)].projector;
      worst = std::max(worst, max_abs_entry(sum - identity));
    }
    return InvariantCheck{"orthonormal bases", worst < 1e-12,
                          fmt::format("max completeness error {:.3g}", worst)};
  });
  guarded("eigen relations", [&] {
    if (states.empty()) throw AlgebraViolation("triple states unavailable");
    double worst = 0.0;
    for (const auto& s : states) {
      const auto& t = square.context(s.context);
      for (int k = 0; k < 3; ++k) {
        const ComplexVector r = square.observables[t[k]] * s.vector - double(s.outcomes[k]) * s.vector;
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
      }
    }
    return InvariantCheck{"eigen relations", worst < 1e-12, fmt::format("max residual {:.3g}", worst)};
  });
  guarded("16+8 state split", [&] {
    if (states.empty()) throw AlgebraViolation("triple states unavailable");
    int product = 0;
    int entangled = 0;
    for (const auto& s : states) {
      product += is_product_state(s.vector) ? 1 : 0;
      entangled += is_maximally_entangled(s.vector) ? 1 : 0;
    }
    return InvariantCheck{"16+8 state split", product == 16 && entangled == 8,
                          fmt::format("{} product, {} maximally entangled", product, entangled)};
  });

  std::optional<TransitionMatrix> chain;
  guarded("matrix symmetry", [&] {
    chain = build_perfect_chain(square);
    const double asym = (chain->entries() - chain->entries().transpose()).cwiseAbs().maxCoeff();
    return InvariantCheck{"matrix symmetry", asym <= 1e-12, fmt::format("max |T - T^T| {:.3g}", asym)};
  });
  guarded("double stochasticity", [&] {
    if (!chain) throw AlgebraViolation("transition matrix unavailable");
    const double col = chain->max_column_sum_error();
    const double row = (chain->entries().rowwise().sum().array() - 1.0).abs().maxCoeff();
    return InvariantCheck{"double stochasticity", std::max(col, row) <= 1e-12,
                          fmt::format("column error {:.3g}, row error {:.3g}", col, row)};
  });
  guarded("spectrum", [&] {
    if (!chain) throw AlgebraViolation("transition matrix unavailable");
    const auto s = spectrum(*chain);
    const int ones = s.multiplicity_of(1.0);
    const int thirds = s.multiplicity_of(1.0 / 3.0);
    const int zeros = s.multiplicity_of(0.0);
    return InvariantCheck{"spectrum", ones == 1 && thirds == 9 && zeros == 14,
                          fmt::format("1 x{}, 1/3 x{}, 0 x{}", ones, thirds, zeros)};
  });
  guarded("stationary uniform", [&] {
    if (!chain) throw AlgebraViolation("transition matrix unavailable");
    const auto pi = stationary(*chain);
    const double err = tv_distance(pi, ProbabilityVector::uniform(kNumTripleStates));
    return InvariantCheck{"stationary uniform", err <= 1e-12, fmt::format("tv to uniform {:.3g}", err)};
  });
  guarded("effective state", [&] {
    if (states.empty()) throw AlgebraViolation("triple states unavailable");
    const auto rho = effective_state(ProbabilityVector::uniform(kNumTripleStates), states);
    const double err = max_abs_entry(rho - identity / 4.0);
    return InvariantCheck{"effective state", err <= 1e-12, fmt::format("max |rho - 1/4| {:.3g}", err)};
  });
  return checks;
}

int cmd_verify(const Context& ctx, std::optional<int> fault) {
  SquareOperators square;
  if (fault) {
    if (*fault < 1 || *fault > kNumObservables) {
      throw ConfigError(fmt::format("--inject-fault {} outside 1..9", *fault));
    }
    square = build_square();
    square.observables[*fault - 1] *= -1.0;
  } else {
    square = square_from(build_square().observables);
  }
  const auto checks = verify_all(square);
  const bool all = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  if (ctx.global.json) {
    auto rows = json::array();
    for (const auto& c : checks) rows.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    ctx.out << json{{"passed", all}, {"checks", rows}}.dump(2) << '\n';
  } else {
    for (const auto& c : checks) {
      ctx.out << fmt::format("{}  {:<22} {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
    }
  }
  return all ? kOk : kInvariantFailure;
}

// ---------------------------------------------------------------------------
// matrix

struct MatrixOptions {
  std::optional<double> noise;
  std::string format = "csv";
};

int cmd_matrix(const Context& ctx, const MatrixOptions& opt) {
  if (opt.format != "csv" && opt.format != "json") {
    throw ConfigError(fmt::format("unknown format '{}', expected csv or json", opt.format));
  }
  const auto square = build_square();
  const auto perfect = build_perfect_chain(square);
  const auto chain = opt.noise ? build_error_chain(perfect, *opt.noise) : perfect;
  const std::string data = opt.format == "csv" ? io::matrix_csv(chain) : io::matrix_json(chain).dump() + "\n";
  const std::string check = fmt::format("{}x{} matrix, max column-sum error {:.3g}", chain.size(),
                                        chain.size(), chain.max_column_sum_error());
  if (ctx.global.out.empty()) {
    ctx.out << data;
    if (!ctx.global.quiet) ctx.err << check << '\n';
    return kOk;
  }
  const fs::path path = ctx.global.out;
  io::write_atomic(path, data);
  json config = {{"format", opt.format}};
  config["noise"] = opt.noise ? json(*opt.noise) : json(nullptr);
  io::RunManifest manifest("matrix", config, ctx.global.seed);
  manifest.add_output(path);
  manifest.write(fs::path(path.string() + ".manifest.json"));
  ctx.note(check);
  ctx.note(fmt::format("wrote {}", path.string()));
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::int64_t rounds = 1000000;
  double noise = 1.0;
  std::optional<std::int64_t> burn_in;
  std::string mode = "chain";
  std::string initial_state = "uniform";
};

ExperimentConfig make_config(const SimulateOptions& opt, std::uint64_t seed) {
  ExperimentConfig config;
  config.rounds = opt.rounds;
  config.burn_in = opt.burn_in.value_or(default_burn_in());
  config.alignment_p = opt.noise;
  config.seed = seed;
  config.mode = parse_mode(opt.mode);
  if (opt.initial_state != "uniform") {
    const double idx = parse_double(opt.initial_state);
    if (idx != std::floor(idx)) throw ConfigError("initial state must be an index or 'uniform'");
    config.initial_state = static_cast<int>(idx);
  }
  config.validate();
  return config;
}

int cmd_simulate(const Context& ctx, const SimulateOptions& opt) {
  const auto config = make_config(opt, ctx.global.seed);
  const auto square = build_square();
  const auto chain = build_error_chain(build_perfect_chain(square), config.alignment_p);
  const auto traj = run(config, square, chain);
  const auto report = evaluate_inequality(estimate_correlators(traj));
  const auto report_doc = io::report_json(report);

  if (ctx.global.out.empty()) {
    ctx.out << report_doc.dump(2) << '\n';
    return kOk;
  }

  const fs::path dir = ctx.global.out;
  std::vector<fs::path> written;
  try {
    fs::create_directories(dir);
    const auto traj_path = dir / "trajectory.csv";
    const auto report_path = dir / "report.json";
    io::write_atomic(traj_path, io::trajectory_csv(traj));
    written.push_back(traj_path);
    io::write_atomic(report_path, report_doc.dump(2) + "\n");
    written.push_back(report_path);
    io::RunManifest manifest("simulate", io::config_json(config), config.seed);
    manifest.add_output(traj_path);
    manifest.add_output(report_path);
    manifest.write(dir / "manifest.json");
  } catch (const fs::filesystem_error& e) {
    for (const auto& p : written) fs::remove(p);
    throw IoError(e.what());
  } catch (...) {
    for (const auto& p : written) fs::remove(p);
    throw;
  }
  ctx.note(fmt::format("inequality value {} +/- {} (bound 4){}", io::format_number(report.value),
                       io::format_number(report.std_error), report.violated ? ", violated" : ""));
  ctx.note(fmt::format("wrote {}", dir.string()));
  return kOk;
}

// ---------------------------------------------------------------------------
// mixing

struct MixingOptions {
  double epsilon = 1e-3;
  std::optional<double> noise;
};

int cmd_mixing(const Context& ctx, const MixingOptions& opt) {
  const double closed_form = mixing_time_bound(opt.epsilon);
  const auto perfect = build_perfect_chain(build_square());
  const auto chain = opt.noise ? build_error_chain(perfect, *opt.noise) : perfect;

  double bound = closed_form;
  double lambda_star = 1.0 / 3.0;
  double pi_min = 1.0 / kNumTripleStates;
  if (opt.noise) {
    const auto pi = stationary(chain);
    pi_min = 1.0;
    for (int q = 0; q < pi.size(); ++q) {
      if (pi[q] > 0.0) pi_min = std::min(pi_min, pi[q]);
    }
    lambda_star = spectrum(chain).second_largest;
    bound = mixing_time_bound(opt.epsilon, pi_min, lambda_star);
  }
  const int horizon = static_cast<int>(std::ceil(bound)) + 5;
  const auto d = worst_case_distances(chain, horizon);
  std::optional<int> crossing;
  for (int t = 0; t < static_cast<int>(d.size()); ++t) {
    if (d[t] <= opt.epsilon) {
      crossing = t;
      break;
    }
  }

  if (ctx.global.json) {
    json doc = {{"epsilon", opt.epsilon},       {"states", chain.size()},
                {"bound", bound},               {"closed_form_bound", closed_form},
                {"lambda_star", lambda_star},   {"pi_min", pi_min},
                {"distances", d}};
    doc["noise"] = opt.noise ? json(*opt.noise) : json(nullptr);
    doc["crossing"] = crossing ? json(*crossing) : json(nullptr);
    ctx.out << doc.dump(2) << '\n';
  } else {
    ctx.out << fmt::format("epsilon       {}\n", io::format_number(opt.epsilon));
    ctx.out << fmt::format("bound         {:.2f}\n", bound);
    if (opt.noise) {
      ctx.out << fmt::format("lambda_*      {:.6g}\npi_min        {:.6g}\n", lambda_star, pi_min);
      ctx.out << fmt::format("closed form   {:.2f} (perfect chain)\n", closed_form);
    }
    ctx.out << "t,d(t)\n";
    for (int t = 0; t < static_cast<int>(d.size()); ++t) {
      ctx.out << t << ',' << io::format_number(d[t]) << '\n';
    }
    ctx.out << "crossing      " << (crossing ? std::to_string(*crossing) : std::string("none")) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// coupon

struct CouponOptions {
  std::int64_t trials = 10000;
  double noise = 1.0;
  std::optional<std::int64_t> burn_in;
  std::int64_t max_rounds = 20000;
};

int cmd_coupon(const Context& ctx, const CouponOptions& opt) {
  if (opt.trials < 1) throw ConfigError("--trials must be at least 1");
  if (opt.max_rounds < 1) throw ConfigError("--max-rounds must be at least 1");
  ExperimentConfig config;
  config.burn_in = opt.burn_in.value_or(default_burn_in());
  config.rounds = config.burn_in + opt.max_rounds;
  config.alignment_p = opt.noise;
  config.seed = ctx.global.seed;
  config.validate();

  const auto square = build_square();
  const auto chain = build_error_chain(build_perfect_chain(square), config.alignment_p);
  std::vector<std::optional<std::int64_t>> times(static_cast<size_t>(opt.trials));
  run_trials(config, square, chain, opt.trials,
             [&](std::int64_t k, Trajectory&& traj) { times[k] = coupon_time(traj); });

  std::vector<double> done;
  for (const auto& t : times) {
    if (t) done.push_back(static_cast<double>(*t));
  }
  const double n = static_cast<double>(done.size());
  double mean = 0.0;
  for (double t : done) mean += t;
  mean = done.empty() ? 0.0 : mean / n;
  double var = 0.0;
  for (double t : done) var += (t - mean) * (t - mean);
  var = done.size() > 1 ? var / (n - 1.0) : 0.0;

  json doc = {
      {"trials", opt.trials},
      {"completed", done.size()},
      {"incomplete", opt.trials - static_cast<std::int64_t>(done.size())},
      {"noise", opt.noise},
      {"burn_in", config.burn_in},
      {"max_rounds", opt.max_rounds},
      {"seed", config.seed},
      {"mean", mean},
      {"variance", var},
      {"std_error", done.size() > 1 ? std::sqrt(var / n) : 0.0},
  };
  if (opt.noise > 0.0) {
    const double analytic = coupon_expectation(kNumTripleStates, 1.0 - opt.noise);
    doc["analytic"] = analytic;
    doc["relative_deviation"] = done.empty() ? json(nullptr) : json((mean - analytic) / analytic);
  } else {
    doc["analytic"] = nullptr;
  }
  const std::string text = doc.dump(2) + "\n";
  if (ctx.global.out.empty()) {
    ctx.out << text;
  } else {
    const fs::path path = ctx.global.out;
    io::write_atomic(path, text);
    io::RunManifest manifest("coupon", {{"trials", opt.trials}, {"noise", opt.noise},
                                        {"burn_in", config.burn_in}, {"max_rounds", opt.max_rounds}},
                             config.seed);
    manifest.add_output(path);
    manifest.write(fs::path(path.string() + ".manifest.json"));
    ctx.note(fmt::format("wrote {}", path.string()));
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::string grid = "0.70:0.05:1.00";
  std::int64_t rounds = 1000000;
  std::optional<std::int64_t> burn_in;
};

int cmd_sweep(const Context& ctx, const SweepOptions& opt) {
  const auto grid = parse_grid(opt.grid);
  const std::int64_t burn_in = opt.burn_in.value_or(default_burn_in());
  if (opt.rounds <= burn_in) {
    throw ConfigError(fmt::format("rounds {} must exceed burn-in {}", opt.rounds, burn_in));
  }
  const auto points = sweep_noise(build_square(), grid, opt.rounds, ctx.global.seed, burn_in);
  const std::string csv = io::sweep_csv(points);
  if (ctx.global.out.empty()) {
    ctx.out << csv;
    return kOk;
  }
  const fs::path path = ctx.global.out;
  io::write_atomic(path, csv);
  io::RunManifest manifest("sweep", {{"grid", opt.grid}, {"rounds", opt.rounds}, {"burn_in", burn_in}},
                           ctx.global.seed);
  manifest.add_output(path);
  manifest.write(fs::path(path.string() + ".manifest.json"));
  ctx.note(fmt::format("wrote {}", path.string()));
  return kOk;
}

// ---------------------------------------------------------------------------
// config file

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read config file {}", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config file {}: {}", path, e.what()));
  }
}

// Looks up `key` in the subcommand section first, then at top level.
class ConfigSource {
 public:
  ConfigSource(json doc, std::string section) : doc_(std::move(doc)), section_(std::move(section)) {}

  template <typename T>
  void apply(const std::string& key, T& target) const {
    if (const json* v = find(key)) target = get<T>(key, *v);
  }

  template <typename T>
  void apply(const std::string& key, std::optional<T>& target) const {
    if (const json* v = find(key); v && !v->is_null()) target = get<T>(key, *v);
  }

 private:
  const json* find(const std::string& key) const {
    if (!doc_.is_object()) return nullptr;
    if (auto s = doc_.find(section_); s != doc_.end() && s->is_object()) {
      if (auto it = s->find(key); it != s->end()) return &*it;
    }
    if (auto it = doc_.find(key); it != doc_.end()) return &*it;
    return nullptr;
  }

  template <typename T>
  static T get(const std::string& key, const json& v) {
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        return v.is_string() ? v.get<std::string>() : v.dump();
      } else {
        return v.get<T>();
      }
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("config key '{}' has the wrong type", key));
    }
  }

  json doc_;
  std::string section_;
};

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string_view> parts;
    std::string_view rest = text;
    for (size_t pos; (pos = rest.find(':')) != std::string_view::npos;) {
      parts.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    parts.push_back(rest);
    if (parts.size() != 3) throw ConfigError(fmt::format("grid '{}' is not start:step:stop", text));
    const double start = parse_double(parts[0]);
    const double stepv = parse_double(parts[1]);
    const double stop = parse_double(parts[2]);
    if (stepv <= 0.0 || stop < start) {
      throw ConfigError(fmt::format("grid '{}' needs a positive step and stop >= start", text));
    }
    const auto count = static_cast<std::int64_t>(std::floor((stop - start) / stepv + 1e-9)) + 1;
    if (count > 100000) throw ConfigError(fmt::format("grid '{}' has too many points", text));
    for (std::int64_t k = 0; k < count; ++k) values.push_back(std::min(stop, start + k * stepv));
  } else {
    std::string_view rest = text;
    while (true) {
      const auto pos = rest.find(',');
      values.push_back(parse_double(rest.substr(0, pos)));
      if (pos == std::string_view::npos) break;
      rest.remove_prefix(pos + 1);
    }
  }
  for (double p : values) {
    if (p < 0.0 || p > 1.0) throw ConfigError(fmt::format("grid value {} outside [0,1]", p));
  }
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  GlobalOptions global;
  std::optional<int> fault;
  MatrixOptions matrix_opt;
  SimulateOptions sim_opt;
  MixingOptions mix_opt;
  CouponOptions coupon_opt;
  SweepOptions sweep_opt;

  CLI::App app{"State-recycling simulator for the Peres-Mermin contextuality test", "pmrecycle"};
  app.set_version_flag("--version", io::tool_version());
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", global.seed, "RNG seed (u64)");
  app.add_option("--config", global.config_path, "JSON config file; flags override it");
  app.add_flag("--json", global.json, "Machine-readable output");
  app.add_option("--out", global.out, "Output path");
  app.add_flag("--quiet", global.quiet, "Suppress progress notes");

  auto* verify = app.add_subcommand("verify", "Check the operator algebra and the chain spectrum");
  verify->add_option("--inject-fault", fault, "Negate observable k before checking")->group("");

  auto* matrix = app.add_subcommand("matrix", "Export the transition matrix");
  matrix->add_option("--noise", matrix_opt.noise, "Alignment probability p; exports the 48-state chain");
  matrix->add_option("--format", matrix_opt.format, "csv or json");

  auto* simulate = app.add_subcommand("simulate", "Simulate a recycled measurement trajectory");
  simulate->add_option("--rounds", sim_opt.rounds, "Number of rounds N");
  simulate->add_option("--noise", sim_opt.noise, "Alignment probability p");
  simulate->add_option("--burn-in", sim_opt.burn_in, "Rounds discarded before estimation");
  simulate->add_option("--mode", sim_opt.mode, "chain or quantum");
  simulate->add_option("--initial-state", sim_opt.initial_state, "Flat index 0..23 or 'uniform'");

  auto* mixing = app.add_subcommand("mixing", "Mixing-time bound and worst-case distances");
  mixing->add_option("--epsilon", mix_opt.epsilon, "Target accuracy");
  mixing->add_option("--noise", mix_opt.noise, "Alignment probability p; uses the 48-state chain");

  auto* coupon = app.add_subcommand("coupon", "Coupon-collector statistics over many trajectories");
  coupon->add_option("--trials", coupon_opt.trials, "Number of trajectories");
  coupon->add_option("--noise", coupon_opt.noise, "Alignment probability p");
  coupon->add_option("--burn-in", coupon_opt.burn_in, "Rounds discarded first");
  coupon->add_option("--max-rounds", coupon_opt.max_rounds, "Post-burn-in rounds per trajectory");

  auto* sweep = app.add_subcommand("sweep", "Inequality value across alignment probabilities");
  sweep->add_option("--grid", sweep_opt.grid, "start:step:stop or comma-separated values");
  sweep->add_option("--rounds", sweep_opt.rounds, "Rounds per grid point");
  sweep->add_option("--burn-in", sweep_opt.burn_in, "Rounds discarded per grid point");

  try {
    // Config file values become the defaults that flags then override.
    if (auto path = find_config_path(args)) {
      std::string section;
      for (const auto* sub : {verify, matrix, simulate, mixing, coupon, sweep}) {
        if (std::find(args.begin(), args.end(), sub->get_name()) != args.end()) section = sub->get_name();
      }
      const ConfigSource cfg(load_config(*path), section);
      cfg.apply("seed", global.seed);
      cfg.apply("json", global.json);
      cfg.apply("out", global.out);
      cfg.apply("quiet", global.quiet);
      if (section == "matrix") {
        cfg.apply("noise", matrix_opt.noise);
        cfg.apply("format", matrix_opt.format);
      } else if (section == "simulate") {
        cfg.apply("rounds", sim_opt.rounds);
        cfg.apply("noise", sim_opt.noise);
        cfg.apply("burn_in", sim_opt.burn_in);
        cfg.apply("mode", sim_opt.mode);
        cfg.apply("initial_state", sim_opt.initial_state);
      } else if (section == "mixing") {
        cfg.apply("epsilon", mix_opt.epsilon);
        cfg.apply("noise", mix_opt.noise);
      } else if (section == "coupon") {
        cfg.apply("trials", coupon_opt.trials);
        cfg.apply("noise", coupon_opt.noise);
        cfg.apply("burn_in", coupon_opt.burn_in);
        cfg.apply("max_rounds", coupon_opt.max_rounds);
      } else if (section == "sweep") {
        cfg.apply("grid", sweep_opt.grid);
        cfg.apply("rounds", sweep_opt.rounds);
        cfg.apply("burn_in", sweep_opt.burn_in);
      }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kConfigError;
    }

    const Context ctx{global, out, err};
    if (verify->parsed()) return cmd_verify(ctx, fault);
    if (matrix->parsed()) return cmd_matrix(ctx, matrix_opt);
    if (simulate->parsed()) return cmd_simulate(ctx, sim_opt);
    if (mixing->parsed()) return cmd_mixing(ctx, mix_opt);
    if (coupon->parsed()) return cmd_coupon(ctx, coupon_opt);
    if (sweep->parsed()) return cmd_sweep(ctx, sweep_opt);
    return kConfigError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const AlgebraViolation& e) {
    err << "invariant failure: " << e.what() << '\n';
    return kInvariantFailure;
  } catch (const NoConvergence& e) {
    err << "invariant failure: " << e.what() << '\n';
    return kInvariantFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace pmrecycle::cli
