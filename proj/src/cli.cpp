#include "mirs/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "mirs/errors.hpp"
#include "mirs/estimate.hpp"
#include "mirs/harness.hpp"
#include "mirs/resample.hpp"
#include "mirs/version.hpp"

namespace mirs {

namespace {

using nlohmann::json;

std::string iso8601_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

const char* method_name(Method m) {
  return m == Method::Jackknife ? "jackknife" : "bootstrap";
}

const char* mode_name(Mode m) {
  return m == Mode::ReImpute ? "reimpute" : "reuse";
}

std::vector<int> parse_m_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(field, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad --m value '" + field + "'");
    }
    if (used != field.size() || v < 1)
      throw ConfigError("bad --m value '" + field + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--m must list at least one value");
  return out;
}

// Writes to --out when given, stdout otherwise.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw StudyError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    stream().flush();
    if (file_.is_open() && !file_) throw StudyError("I/O failure on output");
  }

 private:
  std::ofstream file_;
};

json dgp_to_json(const DgpConfig& dgp) {
  return json{{"population_size", dgp.population_size},
              {"rho", dgp.rho},
              {"p_s", dgp.p_s},
              {"conv_intercept", dgp.conv_intercept},
              {"conv_slope_x2", dgp.conv_slope_x2},
              {"miss_intercept", dgp.miss_intercept},
              {"miss_slope_x1", dgp.miss_slope_x1},
              {"outcome_coef_x1", dgp.outcome_coef_x1},
              {"outcome_coef_x2", dgp.outcome_coef_x2}};
}

struct SimulateArgs {
  std::string method;
  int groups = 0;
  int boots = 0;
  std::string m_text = "1";
  std::string mode = "reimpute";
  int reps = 500;
  std::uint64_t seed = 20240101;
  double alpha = 0.05;
  int sweeps = 1;
  std::string out;
  std::string format = "table";
};

int cmd_simulate(const SimulateArgs& args) {
  StudyConfig base;
  if (args.method == "jackknife") {
    base.method = Method::Jackknife;
    if (args.boots > 0) {
      std::cerr << "mirs: --boots is a bootstrap flag; use --groups with "
                   "--method jackknife\n";
      return 2;
    }
    if (args.groups < 2) {
      std::cerr << "mirs: --method jackknife requires --groups >= 2\n";
      return 2;
    }
    base.G_or_B = args.groups;
  } else if (args.method == "bootstrap") {
    base.method = Method::Bootstrap;
    if (args.groups > 0) {
      std::cerr << "mirs: --groups is a jackknife flag; use --boots with "
                   "--method bootstrap\n";
      return 2;
    }
    if (args.boots < 2) {
      std::cerr << "mirs: --method bootstrap requires --boots >= 2\n";
      return 2;
    }
    base.G_or_B = args.boots;
  } else {
    std::cerr << "mirs: --method must be jackknife or bootstrap\n";
    return 2;
  }

  std::vector<Mode> modes;
  if (args.mode == "reimpute") {
    modes = {Mode::ReImpute};
  } else if (args.mode == "reuse") {
    modes = {Mode::Reuse};
  } else if (args.mode == "both") {
    modes = {Mode::ReImpute, Mode::Reuse};
  } else {
    std::cerr << "mirs: --mode must be reimpute, reuse or both\n";
    return 2;
  }
  if (args.format != "table" && args.format != "csv" &&
      args.format != "json") {
    std::cerr << "mirs: --format must be table, csv or json\n";
    return 2;
  }

  base.J = args.reps;
  base.master_seed = args.seed;
  base.alpha = args.alpha;
  base.sweeps = args.sweeps;

  std::vector<GridCell> cells;
  std::vector<int> m_list;
  try {
    m_list = parse_m_list(args.m_text);
    base.validate();
  } catch (const ConfigError& e) {
    std::cerr << "mirs: " << e.what() << "\n";
    return 2;
  }
  for (Mode mode : modes)
    for (int m : m_list) cells.push_back({mode, m});

  const std::string started = iso8601_now();
  RunOptions opts;
  opts.workers = default_worker_count();
  const int tick = std::max(1, base.J / 10);
  opts.progress = [&](int done, int total) {
    if (done % tick == 0 || done == total)
      std::cerr << "mirs: " << done << "/" << total << " repetitions\n";
  };

  GridResult result;
  try {
    result = run_study_grid(base, cells, opts);
  } catch (const std::exception& e) {
    std::cerr << "mirs: study failed: " << e.what() << "\n";
    return 1;
  }
  const std::string finished = iso8601_now();

  try {
    OutputTarget target(args.out);
    std::ostream& os = target.stream();
    if (args.format == "csv") {
      os << "method,G_or_B,m,mode,J,bias,rmse,coverage,mean_variance,seed\n";
      for (const StudyMetrics& cell : result.cells) {
        os << method_name(cell.config.method) << ',' << cell.config.G_or_B
           << ',' << cell.config.m << ',' << mode_name(cell.config.mode) << ','
           << cell.J << ',' << fmt_full(cell.bias) << ',' << fmt_full(cell.rmse)
           << ',' << fmt_full(cell.coverage) << ','
           << fmt_full(cell.mean_variance) << ',' << cell.config.master_seed
           << '\n';
      }
    } else if (args.format == "json") {
      json manifest;
      manifest["command"] = "simulate";
      manifest["version"] = kVersion;
      manifest["started_at"] = started;
      manifest["finished_at"] = finished;
      manifest["seed"] = base.master_seed;
      manifest["workers"] = opts.workers;
      manifest["config"] = {{"method", method_name(base.method)},
                            {"G_or_B", base.G_or_B},
                            {"m_list", m_list},
                            {"mode", args.mode},
                            {"reps", base.J},
                            {"alpha", base.alpha},
                            {"sweeps", base.sweeps},
                            {"dgp", dgp_to_json(base.dgp)}};
      manifest["failed_repetitions"] = result.failed_repetitions;
      manifest["regenerations"] = result.regenerations;
      json rows = json::array();
      for (const StudyMetrics& cell : result.cells) {
        rows.push_back({{"method", method_name(cell.config.method)},
                        {"G_or_B", cell.config.G_or_B},
                        {"m", cell.config.m},
                        {"mode", mode_name(cell.config.mode)},
                        {"J", cell.J},
                        {"bias", cell.bias},
                        {"rmse", cell.rmse},
                        {"coverage", cell.coverage},
                        {"coverage_vs_half", cell.coverage_vs_half},
                        {"mean_variance", cell.mean_variance},
                        {"seed", cell.config.master_seed}});
      }
      manifest["cells"] = rows;
      os << manifest.dump(2) << '\n';
    } else {
      char line[256];
      std::snprintf(line, sizeof(line), "%-10s %6s %4s %-9s %5s %12s %12s %10s %14s %10s\n",
                    "method", "G_or_B", "m", "mode", "J", "bias", "rmse",
                    "coverage", "mean_variance", "seed");
      os << line;
      for (const StudyMetrics& cell : result.cells) {
        std::snprintf(line, sizeof(line),
                      "%-10s %6d %4d %-9s %5d %12s %12s %10s %14s %10llu\n",
                      method_name(cell.config.method), cell.config.G_or_B,
                      cell.config.m, mode_name(cell.config.mode), cell.J,
                      fmt_short(cell.bias).c_str(),
                      fmt_short(cell.rmse).c_str(),
                      fmt_short(cell.coverage).c_str(),
                      fmt_short(cell.mean_variance).c_str(),
                      static_cast<unsigned long long>(
                          cell.config.master_seed));
        os << line;
      }
    }
    target.finish();
  } catch (const std::exception& e) {
    std::cerr << "mirs: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

struct EstimateArgs {
  std::string input;
  std::string method = "jackknife";
  int groups = 0;
  int boots = 0;
  int m = 1;
  double alpha = 0.05;
  std::uint64_t seed = 20240101;
  int sweeps = 1;
  std::string out;
  std::string format = "table";
};

int cmd_estimate(const EstimateArgs& args) {
  namespace sp = stream_purpose;
  Method method;
  int count = 0;
  if (args.method == "jackknife") {
    method = Method::Jackknife;
    if (args.boots > 0 || args.groups < 2) {
      std::cerr << "mirs: jackknife estimation requires --groups >= 2 "
                   "(and no --boots)\n";
      return 2;
    }
    count = args.groups;
  } else if (args.method == "bootstrap") {
    method = Method::Bootstrap;
    if (args.groups > 0 || args.boots < 2) {
      std::cerr << "mirs: bootstrap estimation requires --boots >= 2 "
                   "(and no --groups)\n";
      return 2;
    }
    count = args.boots;
  } else {
    std::cerr << "mirs: --method must be jackknife or bootstrap\n";
    return 2;
  }
  if (args.m < 1 || args.sweeps < 1 || !(args.alpha > 0 && args.alpha < 1)) {
    std::cerr << "mirs: invalid --m/--sweeps/--alpha\n";
    return 2;
  }
  if (args.format != "table" && args.format != "csv" &&
      args.format != "json") {
    std::cerr << "mirs: --format must be table, csv or json\n";
    return 2;
  }

  DataMatrix data;
  try {
    data = read_csv(args.input);
    data.validate();
    if (data.n() < 2) throw InputError("need at least 2 rows");
  } catch (const InputError& e) {
    std::cerr << "mirs: " << e.what() << "\n";
    return 2;
  }

  CombinedEstimate est;
  try {
    const StreamKey root{args.seed, {0}};
    RandomStream plan_stream = derive_stream(root.child(
        method == Method::Jackknife ? sp::kJackknifePartition
                                    : sp::kBootstrapDraws));
    const ReplicatePlan plan =
        method == Method::Jackknife
            ? make_jackknife_plan(data.n(), count, plan_stream)
            : make_bootstrap_plan(data.n(), count, plan_stream);
    const StreamKey impute_root = root.child(
        method == Method::Jackknife ? sp::kJackknifeImpute
                                    : sp::kBootstrapImpute);
    ImputationSpec spec;
    spec.m = args.m;
    spec.sweeps = args.sweeps;
    std::vector<double> thetas(plan.count());
    for (int r = 0; r < plan.count(); ++r) {
      const DataMatrix rep = materialize_replicate(data, plan, r);
      thetas[r] = replicate_estimate(
          rep, spec, impute_root.child(static_cast<std::uint64_t>(r)));
    }
    est = method == Method::Jackknife
              ? jackknife_combine(thetas, args.alpha)
              : bootstrap_combine(thetas, args.alpha);
    est.m = args.m;
    est.mode = Mode::ReImpute;
  } catch (const ConfigError& e) {
    std::cerr << "mirs: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mirs: estimation failed: " << e.what() << "\n";
    return 1;
  }

  try {
    OutputTarget target(args.out);
    std::ostream& os = target.stream();
    if (args.format == "csv") {
      os << "method,G_or_B,m,mode,alpha,seed,point,variance,ci_low,ci_high\n"
         << method_name(est.method) << ',' << est.G_or_B << ',' << est.m << ','
         << mode_name(est.mode) << ',' << fmt_full(est.alpha) << ','
         << args.seed << ',' << fmt_full(est.point) << ','
         << fmt_full(est.variance) << ',' << fmt_full(est.ci_low) << ','
         << fmt_full(est.ci_high) << '\n';
    } else if (args.format == "json") {
      json doc;
      doc["command"] = "estimate";
      doc["version"] = kVersion;
      doc["seed"] = args.seed;
      doc["config"] = {{"input", args.input},
                       {"method", method_name(est.method)},
                       {"G_or_B", est.G_or_B},
                       {"m", est.m},
                       {"alpha", est.alpha},
                       {"sweeps", args.sweeps}};
      doc["result"] = {{"point", est.point},
                       {"variance", est.variance},
                       {"ci_low", est.ci_low},
                       {"ci_high", est.ci_high}};
      os << doc.dump(2) << '\n';
    } else {
      os << "method    " << method_name(est.method) << "\n"
         << "G_or_B    " << est.G_or_B << "\n"
         << "m         " << est.m << "\n"
         << "alpha     " << fmt_short(est.alpha) << "\n"
         << "point     " << fmt_short(est.point) << "\n"
         << "variance  " << fmt_short(est.variance) << "\n"
         << "ci_low    " << fmt_short(est.ci_low) << "\n"
         << "ci_high   " << fmt_short(est.ci_high) << "\n";
    }
    target.finish();
  } catch (const std::exception& e) {
    std::cerr << "mirs: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

struct GenerateArgs {
  std::size_t pop_size = 20000;
  std::uint64_t seed = 20240101;
  std::string out;
};

int cmd_generate(const GenerateArgs& args) {
  namespace sp = stream_purpose;
  DgpConfig dgp;
  dgp.population_size = args.pop_size;
  try {
    dgp.validate();
  } catch (const ConfigError& e) {
    std::cerr << "mirs: " << e.what() << "\n";
    return 2;
  }
  try {
    const StreamKey root{args.seed, {0}};
    RandomStream pop_stream =
        derive_stream(root.child(sp::kPopulation).child(0));
    const Population pop = generate_population(dgp, pop_stream);
    std::optional<DataMatrix> data;
    for (std::uint64_t attempt = 0; attempt <= 3 && !data; ++attempt) {
      RandomStream s =
          derive_stream(root.child(sp::kSampleAssignment).child(attempt));
      data = draw_samples(pop, dgp, s);
    }
    if (!data) throw StudyError("sample draw kept degenerating");
    std::optional<DataMatrix> masked;
    for (std::uint64_t attempt = 0; attempt <= 3 && !masked; ++attempt) {
      RandomStream s =
          derive_stream(root.child(sp::kMissingness).child(attempt));
      masked = apply_missingness(*data, dgp, s);
    }
    if (!masked) throw StudyError("missingness kept masking everything");
    write_csv(*masked, args.out);
  } catch (const std::exception& e) {
    std::cerr << "mirs: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Resampling variance estimation with stochastic imputation"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run a Monte Carlo study grid");
  simulate->add_option("--method", sim.method, "jackknife or bootstrap")
      ->required();
  simulate->add_option("--groups", sim.groups, "jackknife group count G");
  simulate->add_option("--boots", sim.boots, "bootstrap replicate count B");
  simulate->add_option("--m", sim.m_text,
                       "imputations per replicate (comma list)");
  simulate->add_option("--mode", sim.mode, "reimpute, reuse or both");
  simulate->add_option("--reps", sim.reps, "Monte Carlo repetitions J");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--alpha", sim.alpha, "interval level alpha");
  simulate->add_option("--sweeps", sim.sweeps, "chained-equation sweeps");
  simulate->add_option("--out", sim.out, "output path (default stdout)");
  simulate->add_option("--format", sim.format, "table, csv or json");

  EstimateArgs estArgs;
  CLI::App* estimate =
      app.add_subcommand("estimate", "Analyze a CSV dataset once");
  estimate->add_option("--input", estArgs.input, "input CSV path")->required();
  estimate->add_option("--method", estArgs.method, "jackknife or bootstrap");
  estimate->add_option("--groups", estArgs.groups, "jackknife group count G");
  estimate->add_option("--boots", estArgs.boots, "bootstrap replicate count B");
  estimate->add_option("--m", estArgs.m, "imputations per replicate");
  estimate->add_option("--alpha", estArgs.alpha, "interval level alpha");
  estimate->add_option("--seed", estArgs.seed, "master seed");
  estimate->add_option("--sweeps", estArgs.sweeps, "chained-equation sweeps");
  estimate->add_option("--out", estArgs.out, "output path (default stdout)");
  estimate->add_option("--format", estArgs.format, "table, csv or json");

  GenerateArgs gen;
  CLI::App* generate =
      app.add_subcommand("generate", "Emit one synthetic sampled dataset");
  generate->add_option("--pop-size", gen.pop_size, "population size");
  generate->add_option("--seed", gen.seed, "master seed");
  generate->add_option("--out", gen.out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (simulate->parsed()) return cmd_simulate(sim);
  if (estimate->parsed()) return cmd_estimate(estArgs);
  if (generate->parsed()) return cmd_generate(gen);
  return 2;
}

}  // namespace mirs
