#include "pmedian_cli/run.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "pmedian/pmedian.hpp"
#include "pmedian_cli/dataset.hpp"
#include "pmedian_cli/report.hpp"

namespace pmedian::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::Median: return "median";
    case Command::Mean: return "mean";
    case Command::SweepUnivariate: return "sweep-univariate";
    case Command::SweepMultivariate: return "sweep-multivariate";
    case Command::Breakdown: return "breakdown";
    case Command::Perturbation: return "perturbation";
  }
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::Median, Command::Mean, Command::SweepUnivariate, Command::SweepMultivariate,
                    Command::Breakdown, Command::Perturbation}) {
    if (name == to_string(c)) return c;
  }
  return std::nullopt;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) throw ConfigError("empty entry in number list \"" + text + "\"");
    try {
      size_t used = 0;
      const double v = std::stod(item.substr(first), &used);
      if (item.find_first_not_of(" \t", first + used) != std::string::npos) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigError("not a number: \"" + item + "\"");
    }
  }
  if (out.empty()) throw ConfigError("empty number list");
  return out;
}

namespace {

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key \"" + key + "\" has the wrong type");
  }
}

std::vector<double> list_value(const json& v, const std::string& key) {
  if (v.is_string()) return parse_number_list(v.get<std::string>());
  return get_as<std::vector<double>>(v, key);
}

SolverMethod method_value(const std::string& name) {
  const auto m = parse_solver_method(name);
  if (!m) throw ConfigError("unknown solver method \"" + name + "\"");
  return *m;
}

Command command_value(const std::string& name) {
  const auto c = parse_command(name);
  if (!c) throw ConfigError("unknown command \"" + name + "\"");
  return *c;
}

}  // namespace

RunConfig apply_config_json(RunConfig cfg, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be an object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "command") cfg.command = command_value(get_as<std::string>(v, key));
    else if (key == "input") cfg.input = get_as<std::string>(v, key);
    else if (key == "out") cfg.out_dir = get_as<std::string>(v, key);
    else if (key == "seed") cfg.seed = get_as<std::uint64_t>(v, key);
    else if (key == "alphas") cfg.alphas = list_value(v, key);
    else if (key == "n") cfg.n = get_as<int>(v, key);
    else if (key == "d") cfg.d = get_as<int>(v, key);
    else if (key == "rho") cfg.rho = get_as<double>(v, key);
    else if (key == "trials") cfg.trials = get_as<int>(v, key);
    else if (key == "method") cfg.solver.method = method_value(get_as<std::string>(v, key));
    else if (key == "max-iters") cfg.solver.max_iters = get_as<int>(v, key);
    else if (key == "tol") cfg.solver.tol_residual = get_as<double>(v, key);
    else if (key == "svg") cfg.emit_svg = get_as<bool>(v, key);
    else if (key == "wi") cfg.weight_contaminated = get_as<double>(v, key);
    else if (key == "radii") cfg.radii = list_value(v, key);
    else if (key == "epsilons") cfg.epsilons = list_value(v, key);
    else if (key == "reference-sigma") cfg.reference_sigma = get_as<double>(v, key);
    else if (key == "eta0") cfg.solver.eta0 = get_as<double>(v, key);
    else if (key == "damping") cfg.solver.damping = get_as<double>(v, key);
    else if (key == "weiszfeld-epsilon") cfg.solver.weiszfeld_epsilon = get_as<double>(v, key);
    else throw ConfigError("unknown config key \"" + key + "\"");
  }
  return cfg;
}

json config_to_json(const RunConfig& c) {
  json doc;
  doc["command"] = c.command ? to_string(*c.command) : "";
  doc["input"] = c.input;
  doc["out"] = c.out_dir;
  doc["seed"] = c.seed;
  if (c.alphas) doc["alphas"] = *c.alphas;
  if (c.n) doc["n"] = *c.n;
  if (c.d) doc["d"] = *c.d;
  if (c.rho) doc["rho"] = *c.rho;
  if (c.trials) doc["trials"] = *c.trials;
  doc["method"] = to_string(c.solver.method);
  doc["max-iters"] = c.solver.max_iters;
  doc["tol"] = c.solver.tol_residual;
  doc["svg"] = c.emit_svg;
  doc["wi"] = c.weight_contaminated;
  if (c.radii) doc["radii"] = *c.radii;
  if (c.epsilons) doc["epsilons"] = *c.epsilons;
  doc["reference-sigma"] = c.reference_sigma;
  if (c.solver.eta0) doc["eta0"] = *c.solver.eta0;
  doc["damping"] = c.solver.damping;
  doc["weiszfeld-epsilon"] = c.solver.weiszfeld_epsilon;
  return doc;
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Geometric medians and Frechet means on product manifolds", "pmedian"};
  std::string command, config_path, input, out_dir, alphas, method, radii, epsilons;
  std::uint64_t seed = 0;
  int n = 0, d = 0, trials = 0, max_iters = 0;
  double rho = 0, tol = 0, wi = 0, reference_sigma = 0, eta0 = 0, damping = 0, weiszfeld_epsilon = 0;
  bool svg = false;

  app.add_option("command", command,
                 "median | mean | sweep-univariate | sweep-multivariate | breakdown | perturbation");
  auto* o_config = app.add_option("--config", config_path, "JSON config file; flags override its keys");
  auto* o_input = app.add_option("--input", input, "JSON Lines dataset");
  auto* o_out = app.add_option("--out", out_dir, "Output directory");
  auto* o_seed = app.add_option("--seed", seed, "Base RNG seed");
  auto* o_alphas = app.add_option("--alphas", alphas, "Comma-separated contamination rates");
  auto* o_n = app.add_option("--n", n, "Sample size");
  auto* o_d = app.add_option("--d", d, "Dimension (multivariate sweep)");
  auto* o_rho = app.add_option("--rho", rho, "AR(1) decay (multivariate sweep)");
  auto* o_trials = app.add_option("--trials", trials, "Trials per contamination rate / perturbation size");
  auto* o_method = app.add_option("--method", method, "subgradient | weiszfeld | hybrid");
  auto* o_iters = app.add_option("--max-iters", max_iters, "Solver iteration cap");
  auto* o_tol = app.add_option("--tol", tol, "Residual tolerance");
  auto* o_svg = app.add_option("--svg", svg, "Emit an SVG chart for sweeps (true/false)");
  auto* o_wi = app.add_option("--wi", wi, "Contaminated weight for the breakdown probe");
  auto* o_radii = app.add_option("--radii", radii, "Comma-separated contaminant distances (breakdown)");
  auto* o_eps = app.add_option("--epsilons", epsilons, "Comma-separated perturbation sizes");
  auto* o_ref = app.add_option("--reference-sigma", reference_sigma, "Sigma of the univariate reference");
  auto* o_eta0 = app.add_option("--eta0", eta0, "Subgradient base step");
  auto* o_damp = app.add_option("--damping", damping, "Weiszfeld damping in [0,1]");
  auto* o_weps = app.add_option("--weiszfeld-epsilon", weiszfeld_epsilon, "Weiszfeld distance floor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  RunConfig cfg;
  if (o_config->count()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("invalid config file: ") + e.what());
    }
    cfg = apply_config_json(cfg, doc);
  }
  if (!command.empty()) cfg.command = command_value(command);
  if (o_input->count()) cfg.input = input;
  if (o_out->count()) cfg.out_dir = out_dir;
  if (o_seed->count()) cfg.seed = seed;
  if (o_alphas->count()) cfg.alphas = parse_number_list(alphas);
  if (o_n->count()) cfg.n = n;
  if (o_d->count()) cfg.d = d;
  if (o_rho->count()) cfg.rho = rho;
  if (o_trials->count()) cfg.trials = trials;
  if (o_method->count()) cfg.solver.method = method_value(method);
  if (o_iters->count()) cfg.solver.max_iters = max_iters;
  if (o_tol->count()) cfg.solver.tol_residual = tol;
  if (o_svg->count()) cfg.emit_svg = svg;
  if (o_wi->count()) cfg.weight_contaminated = wi;
  if (o_radii->count()) cfg.radii = parse_number_list(radii);
  if (o_eps->count()) cfg.epsilons = parse_number_list(epsilons);
  if (o_ref->count()) cfg.reference_sigma = reference_sigma;
  if (o_eta0->count()) cfg.solver.eta0 = eta0;
  if (o_damp->count()) cfg.solver.damping = damping;
  if (o_weps->count()) cfg.solver.weiszfeld_epsilon = weiszfeld_epsilon;
  if (!cfg.command) throw ConfigError("no command given");
  return cfg;
}

int resolve_thread_count() {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("PRODUCT_MEDIAN_THREADS"); env && *env) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*end != '\0' || cap < 1) throw ConfigError("PRODUCT_MEDIAN_THREADS must be a positive integer");
    threads = static_cast<int>(std::min<long>(threads, cap));
  }
  return threads;
}

namespace {

struct Failure {
  int code;
  std::string kind;
  std::string message;
  std::optional<int> line;
};

void emit_error(std::ostream& err, const Failure& f) {
  json record = {{"status", "error"}, {"code", f.code}, {"kind", f.kind}, {"message", f.message}};
  if (f.line) record["line"] = *f.line;
  err << record.dump() << '\n';
}

class Artifacts {
 public:
  explicit Artifacts(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw ConfigError("cannot create output directory " + dir);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw ConfigError("cannot write " + path.string());
    written_.push_back(name);
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

ContaminationSpec sweep_spec(const RunConfig& c, Scenario scenario) {
  ContaminationSpec spec;
  spec.scenario = scenario;
  spec.seed = c.seed;
  spec.reference_sigma = c.reference_sigma;
  spec.alpha_grid = c.alphas.value_or(alpha_grid(0.05, 0.45));
  if (scenario == Scenario::Univariate) {
    spec.n = c.n.value_or(1000);
  } else {
    spec.n = c.n.value_or(200);
    spec.d = c.d.value_or(5);
    spec.rho = c.rho.value_or(0.5);
  }
  spec.trials = c.trials.value_or(5);
  return spec;
}

WeightedSample probe_sample(const RunConfig& c, bool euclidean) {
  if (!c.input.empty()) return read_dataset_file(c.input);
  Rng rng(stream_seed(c.seed, 0, 0));
  std::vector<ProductPoint> points;
  if (euclidean) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const int n = c.n.value_or(25);
    for (int i = 0; i < n; ++i) {
      points.push_back({{FactorPoint(Eigen::VectorXd::Constant(1, normal(rng))),
                         FactorPoint(Eigen::VectorXd::Constant(1, normal(rng)))}});
    }
    return WeightedSample::uniform(ProductManifold({Factor::euclidean(1), Factor::euclidean(1)}), std::move(points));
  }
  const int n = c.n.value_or(50);
  for (int i = 0; i < n; ++i) points.push_back(sample_univariate(DrawKind::Signal, rng));
  return WeightedSample::uniform(univariate_gaussian_manifold(), std::move(points));
}

std::string csv(void (*writer)(std::ostream&, const SweepResult&), const SweepResult& r) {
  std::ostringstream out;
  writer(out, r);
  return out.str();
}

json solver_summary(const SolverReport& r) {
  json s = {{"method", to_string(r.method)},
            {"termination", to_string(r.termination)},
            {"iterations", r.iterations_used},
            {"best_objective", r.best_objective},
            {"final_residual", r.final_residual()},
            {"initial_distance", r.initial_distance},
            {"max_subgradient_norm", r.max_subgradient_norm},
            {"events", r.events.size()}};
  if (r.datum_index) s["datum_index"] = *r.datum_index;
  if (r.switch_iteration) s["switch_iteration"] = *r.switch_iteration;
  return s;
}

void execute(const RunConfig& c, json& manifest, Artifacts& out, std::ostream& log) {
  const Command command = *c.command;
  c.solver.validate();
  switch (command) {
    case Command::Median:
    case Command::Mean: {
      if (c.input.empty()) throw ConfigError(std::string(to_string(command)) + " needs --input");
      const WeightedSample sample = read_dataset_file(c.input);
      const ProductPoint mean = product_mean(sample);
      if (command == Command::Mean) {
        out.write("mean.jsonl", point_to_json(sample.manifold(), mean).dump() + "\n");
        log << "mean of " << sample.size() << " points written\n";
        break;
      }
      const SolverReport report = solve_median(sample, mean, c.solver);
      out.write("median.jsonl", point_to_json(sample.manifold(), report.minimizer).dump() + "\n");
      std::ostringstream trace;
      write_trace_csv(trace, report);
      out.write("trace.csv", trace.str());
      manifest["solver"] = solver_summary(report);
      log << "median: " << to_string(report.termination) << " after " << report.iterations_used
          << " iterations, objective " << format_double(report.best_objective) << '\n';
      break;
    }
    case Command::SweepUnivariate:
    case Command::SweepMultivariate: {
      const Scenario scenario = command == Command::SweepUnivariate ? Scenario::Univariate : Scenario::Multivariate;
      const ContaminationSpec spec = sweep_spec(c, scenario);
      try {
        spec.validate();
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
      const int threads = resolve_thread_count();
      const SweepResult result = run_sweep(spec, c.solver, threads);
      out.write("sweep.csv", csv(&write_sweep_csv, result));
      if (c.emit_svg) {
        std::string title = scenario == Scenario::Univariate
                                ? "Univariate Gaussians, n=" + std::to_string(spec.n)
                                : "Multivariate Gaussians, d=" + std::to_string(spec.d) + ", rho=" + format_double(spec.rho) +
                                      ", n=" + std::to_string(spec.n);
        out.write("sweep.svg", sweep_chart_svg(result, title));
      }
      manifest["resolved"] = {{"n", spec.n}, {"trials", spec.trials}, {"alphas", spec.alpha_grid},
                              {"threads", threads}};
      if (scenario == Scenario::Multivariate) {
        manifest["resolved"]["d"] = spec.d;
        manifest["resolved"]["rho"] = spec.rho;
      }
      log << "sweep: " << result.rows.size() << " rows\n";
      break;
    }
    case Command::Breakdown: {
      const WeightedSample clean = probe_sample(c, false);
      const auto radii = c.radii.value_or(std::vector<double>{0.0, 10.0, 100.0, 1000.0, 1e6});
      const double wi = c.weight_contaminated;
      if (!(wi > 0.0 && wi < 1.0) || wi == 0.5) throw ConfigError("--wi must lie in (0,1) and differ from 0.5");
      const BreakdownTable table = breakdown_probe(clean, wi, radii, c.solver);
      std::ostringstream csv_out;
      write_breakdown_csv(csv_out, table);
      out.write("breakdown.csv", csv_out.str());
      manifest["resolved"] = {{"clean_size", clean.size()},
                              {"clean_diameter", table.clean_diameter},
                              {"radii", radii},
                              {"bound", wi < 0.5 ? json(table.clean_diameter / (1.0 - 2.0 * wi)) : json()}};
      log << "breakdown: " << table.rows.size() << " radii\n";
      break;
    }
    case Command::Perturbation: {
      const WeightedSample sample = probe_sample(c, true);
      const auto eps = c.epsilons.value_or(std::vector<double>{0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1});
      const int trials = c.trials.value_or(20);
      if (trials < 1) throw ConfigError("--trials must be positive");
      Rng rng(stream_seed(c.seed, 1, 0));
      const PerturbationTable table = perturbation_probe(sample, eps, rng, c.solver, trials);
      std::ostringstream csv_out;
      write_perturbation_csv(csv_out, table);
      out.write("perturbation.csv", csv_out.str());
      manifest["resolved"] = {{"sample_size", sample.size()}, {"trials", trials}, {"slope", table.slope}};
      log << "perturbation: log-log slope " << format_double(table.slope) << '\n';
      break;
    }
  }
}

}  // namespace

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    if (!config.command) throw ConfigError("no command given");
    Artifacts out(config.out_dir);
    json manifest = {{"tool", "pmedian"},
                     {"version", kVersion},
                     {"command", to_string(*config.command)},
                     {"seed", config.seed},
                     {"config", config_to_json(config)}};
    execute(config, manifest, out, log);
    manifest["outputs"] = out.written();
    out.write("manifest.json", manifest.dump(2) + "\n");
    return kOk;
  } catch (const ConfigError& e) {
    emit_error(err, {kBadConfig, "bad_config", e.what(), std::nullopt});
    return kBadConfig;
  } catch (const DatasetError& e) {
    emit_error(err, {kBadDataset, "bad_dataset", e.what(), e.line() > 0 ? std::optional<int>(e.line()) : std::nullopt});
    return kBadDataset;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidInput) {
      emit_error(err, {kBadConfig, "bad_config", e.what(), std::nullopt});
      return kBadConfig;
    }
    emit_error(err, {kNumericFailure, "numeric_failure", e.what(), std::nullopt});
    return kNumericFailure;
  } catch (const std::exception& e) {
    emit_error(err, {kNumericFailure, "internal", e.what(), std::nullopt});
    return kNumericFailure;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  std::optional<RunConfig> config;
  try {
    config = parse_command_line(argc, argv, log);
  } catch (const ConfigError& e) {
    emit_error(err, {kBadConfig, "bad_config", e.what(), std::nullopt});
    return kBadConfig;
  }
  if (!config) return kOk;
  return run(*config, log, err);
}

}  // namespace pmedian::cli
