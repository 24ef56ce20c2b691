#include "evoesn/experiment.hpp"

#include "evoesn/model_io.hpp"
#include "evoesn/parallel.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace evoesn {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_run_header(const fs::path& dir, const ExperimentConfig& config) {
  fs::create_directories(dir);
  config.save(dir / "config.ini");
  std::string seeds;
  for (auto s : run_seeds(config.run)) seeds += std::to_string(s) + "\n";
  write_text(dir / "seeds.txt", seeds);
}

void write_trace(const fs::path& dir, const SeedResult& r) {
  fs::create_directories(dir / "traces");
  std::ofstream out(dir / "traces" / (seed_tag(r.seed) + ".csv"));
  out << "step,residual,abs_error\n";
  char buf[96];
  for (std::size_t i = 0; i < r.residuals.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, r.residuals[i], std::abs(r.residuals[i]));
    out << buf;
  }
}

void write_history(const fs::path& path, const std::vector<GenerationRecord>& history) {
  std::ofstream out(path);
  out << "generation,best,mean,std,hall_of_fame,evaluations,diverged,wall_seconds\n";
  char buf[256];
  for (const auto& g : history) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%lld,%lld,%.6f\n", static_cast<long long>(g.generation),
                  g.best, g.mean, g.std, g.hall_of_fame, static_cast<long long>(g.evaluations),
                  static_cast<long long>(g.diverged), g.wall_seconds);
    out << buf;
  }
}

json record_json(const RunRecord& record, bool include_timings) {
  json runs = json::array();
  for (const auto& r : record.runs) {
    json j{{"seed", r.seed}, {"ok", r.ok}, {"metrics", r.metrics}};
    if (!r.ok) j["error"] = r.error;
    if (include_timings) j["wall_seconds"] = r.wall_seconds;
    if (!r.history.empty()) {
      json h = json::array();
      for (const auto& g : r.history) {
        json row{{"generation", g.generation}, {"best", g.best},           {"mean", g.mean},
                 {"std", g.std},               {"hall_of_fame", g.hall_of_fame}, {"evaluations", g.evaluations},
                 {"diverged", g.diverged}};
        if (include_timings) row["wall_seconds"] = g.wall_seconds;
        h.push_back(std::move(row));
      }
      j["history"] = std::move(h);
    }
    runs.push_back(std::move(j));
  }
  json summary = json::object();
  for (const auto& name : record.metric_names()) {
    const auto [mean, sd] = record.summary(name);
    summary[name] = {{"mean", mean}, {"std", sd}};
  }
  json doc{{"kind", record.kind},
           {"config_hash", record.config_hash},
           {"version", record.version},
           {"failures", record.failures()},
           {"summary", std::move(summary)},
           {"runs", std::move(runs)}};
  if (include_timings) doc["wall_seconds"] = record.wall_seconds;
  return doc;
}

void check_metrics(SeedResult& r) {
  for (const auto& [name, value] : r.metrics) {
    if (!std::isfinite(value)) {
      r.ok = false;
      r.error = "diverged: non-finite " + name;
      return;
    }
  }
}

}  // namespace

// --- RunRecord -------------------------------------------------------------

Index RunRecord::failures() const {
  Index n = 0;
  for (const auto& r : runs) n += r.ok ? 0 : 1;
  return n;
}

std::pair<double, double> RunRecord::summary(const std::string& metric) const {
  std::vector<double> values;
  for (const auto& r : runs) {
    if (!r.ok) continue;
    auto it = r.metrics.find(metric);
    if (it != r.metrics.end()) values.push_back(it->second);
  }
  if (values.empty()) return {std::nan(""), std::nan("")};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  return {mean, sd};
}

std::vector<std::string> RunRecord::metric_names() const {
  std::optional<std::set<std::string>> common;
  for (const auto& r : runs) {
    if (!r.ok) continue;
    std::set<std::string> names;
    for (const auto& [name, value] : r.metrics) names.insert(name);
    if (!common) {
      common = names;
    } else {
      std::set<std::string> both;
      for (const auto& n : *common)
        if (names.count(n)) both.insert(n);
      common = both;
    }
  }
  if (!common) return {};
  return {common->begin(), common->end()};
}

std::string to_json(const RunRecord& record, bool include_timings) {
  return record_json(record, include_timings).dump(2);
}

bool same_results(const RunRecord& a, const RunRecord& b, double tol) {
  if (a.kind != b.kind || a.config_hash != b.config_hash || a.runs.size() != b.runs.size()) return false;
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    const auto& x = a.runs[i];
    const auto& y = b.runs[i];
    if (x.seed != y.seed || x.ok != y.ok || x.metrics.size() != y.metrics.size()) return false;
    for (const auto& [name, value] : x.metrics) {
      auto it = y.metrics.find(name);
      if (it == y.metrics.end()) return false;
      const double scale = std::max({1.0, std::abs(value), std::abs(it->second)});
      if (!(std::abs(value - it->second) <= tol * scale)) return false;
    }
    if (x.history.size() != y.history.size()) return false;
    for (std::size_t g = 0; g < x.history.size(); ++g) {
      if (x.history[g].hall_of_fame != y.history[g].hall_of_fame || x.history[g].best != y.history[g].best) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::uint64_t> run_seeds(const RunConfig& run) {
  std::vector<std::uint64_t> seeds;
  for (Index k = 0; k < run.repeats; ++k) seeds.push_back(run.seed + static_cast<std::uint64_t>(k));
  return seeds;
}

// --- series and settings ---------------------------------------------------

namespace {

// relative names that do not exist here are looked up in the data directory
fs::path data_file(const std::string& name) {
  const fs::path p(name);
  if (p.is_absolute() || fs::exists(p)) return p;
  return data_directory() / p;
}

}  // namespace

TimeSeries build_series(const ExperimentConfig& config) {
  const auto& t = config.task;
  const Index length = t.length > 0 ? t.length : t.splits.total();
  TimeSeries series;
  if (t.name == "mgs") {
    series = with_splits(generate_mackey_glass(t.mackey_glass, length, t.data_seed), t.splits);
  } else if (t.name == "lorenz") {
    series = with_splits(generate_lorenz(t.lorenz, length), t.splits);
  } else if (t.name == "sunspot") {
    series = load_sunspots(data_file(t.file.empty() ? "sunspot_month_v1.csv" : t.file));
    if (t.splits.total() > 0) series = with_splits(std::move(series), t.splits);
  } else if (t.name == "file") {
    series = with_splits(read_series_csv(data_file(t.file)), t.splits);
  } else {
    throw ConfigError("unknown task '" + t.name + "'");
  }
  if (t.squash) series = apply_transform(std::move(series), Transform{1.0, 0.0, true});
  return series;
}

EsnHyperparameters resolved_hyper(const ExperimentConfig& config, const TimeSeries& series) {
  EsnHyperparameters h = config.esn;
  h.outputs = series.dimension();
  return h;
}

EvoSettings resolved_evo_settings(const ExperimentConfig& config) {
  EvoSettings s = config.evolution;
  s.ridge_lambda = config.ridge_lambda;
  s.variance = config.run.variance;
  return s;
}

// --- baseline --------------------------------------------------------------

SeedResult baseline_seed(const ExperimentConfig& config, const TimeSeries& series, std::uint64_t seed) {
  const auto start = Clock::now();
  SeedResult r;
  r.seed = seed;
  try {
    auto trained = train_on_series(init_esn<double>(resolved_hyper(config, series), seed), series, config.ridge_lambda);
    const EvalReport report =
        evaluate_test(trained, series, config.task.protocol, config.run.variance, config.run.noise_in_free_run);
    r.metrics = report.metrics;
    r.residuals = report.residuals;
    check_metrics(r);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  r.wall_seconds = seconds_since(start);
  return r;
}

RunRecord run_baseline(const ExperimentConfig& config, unsigned workers, const std::optional<fs::path>& out) {
  config.validate();
  if (config.grid_size() != 1) throw ConfigError("baseline needs a single hyperparameter point; use grid");
  const auto start = Clock::now();
  const TimeSeries series = build_series(config);
  const auto seeds = run_seeds(config.run);
  RunRecord record;
  record.kind = "baseline";
  record.config_hash = config.hash();
  record.runs.resize(seeds.size());
  parallel_for(seeds.size(), workers, [&](std::size_t i) { record.runs[i] = baseline_seed(config, series, seeds[i]); });
  record.wall_seconds = seconds_since(start);
  if (out) {
    write_run_header(*out, config);
    for (const auto& r : record.runs)
      if (r.ok) write_trace(*out, r);
    write_text(*out / "results.json", to_json(record));
  }
  return record;
}

// --- evolve ----------------------------------------------------------------

namespace {

SeedResult evolve_seed(const ExperimentConfig& config, const TimeSeries& series, std::uint64_t seed, unsigned workers,
                       const std::optional<fs::path>& out, const EvolveOptions& options) {
  const auto start = Clock::now();
  SeedResult r;
  r.seed = seed;
  const EvoProblem problem(init_esn<double>(resolved_hyper(config, series), seed), series,
                           resolved_evo_settings(config));
  const FitnessFunction fitness = problem.fitness_function();
  const std::string fingerprint = config.hash() + "/" + std::to_string(seed);
  const std::optional<fs::path> checkpoint =
      out ? std::optional<fs::path>(*out / ("checkpoint_" + seed_tag(seed) + ".bin")) : std::nullopt;

  GaState state;
  if (options.resume && checkpoint && fs::exists(*checkpoint)) {
    state = load_checkpoint(*checkpoint);
    if (state.fingerprint != fingerprint) {
      throw LoadError(checkpoint->string() + " belongs to a different experiment (" + state.fingerprint + ")");
    }
  } else {
    state = init_population(
        config.ga, [&](Index i) { return problem.initial_genes(i); }, fitness, seed, workers);
    state.fingerprint = fingerprint;
    if (checkpoint) save_checkpoint(state, *checkpoint);
  }

  auto report_generation = [&](const GaState& s) {
    if (options.verbose) {
      std::fprintf(stderr, "[%s] gen %lld  best %.6g  mean %.6g  hof %.6g  (%.1fs)\n", seed_tag(seed).c_str(),
                   static_cast<long long>(s.generation), s.history.back().best, s.history.back().mean,
                   s.history.back().hall_of_fame, s.history.back().wall_seconds);
    }
    if (checkpoint && s.generation % config.run.checkpoint_every == 0) save_checkpoint(s, *checkpoint);
  };
  if (options.verbose && !state.history.empty()) report_generation(state);
  run_ga(state, config.ga, fitness, workers, report_generation, options.stop_at);
  if (checkpoint) save_checkpoint(state, *checkpoint);
  r.history = state.history;

  try {
    const TrainedEsn trained = problem.train(state.hall_of_fame.genes);
    const EvalReport report =
        evaluate_test(trained, series, config.task.protocol, config.run.variance, config.run.noise_in_free_run);
    r.metrics = report.metrics;
    r.residuals = report.residuals;
    r.metrics["fitness"] = state.hall_of_fame.fitness.value_or(std::nan(""));
    r.metrics["generations"] = static_cast<double>(state.generation);
    check_metrics(r);
    if (out) save_model(trained.model, *out / ("model_" + seed_tag(seed) + ".json"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  if (out) write_history(*out / ("history_" + seed_tag(seed) + ".csv"), r.history);
  r.wall_seconds = seconds_since(start);
  return r;
}

}  // namespace

RunRecord run_evolve(const ExperimentConfig& config, unsigned workers, const std::optional<fs::path>& out,
                     const EvolveOptions& options) {
  config.validate();
  if (config.grid_size() != 1) throw ConfigError("evolve needs a single hyperparameter point");
  const auto start = Clock::now();
  const TimeSeries series = build_series(config);
  RunRecord record;
  record.kind = "evolve";
  record.config_hash = config.hash();
  if (out) write_run_header(*out, config);
  // seeds run one after another; the population is evaluated in parallel
  for (auto seed : run_seeds(config.run)) {
    record.runs.push_back(evolve_seed(config, series, seed, workers, out, options));
    if (out && record.runs.back().ok) write_trace(*out, record.runs.back());
  }
  record.wall_seconds = seconds_since(start);
  if (out) write_text(*out / "results.json", to_json(record));
  return record;
}

RunRecord resume_evolve(const fs::path& dir, unsigned workers, const EvolveOptions& options) {
  const ExperimentConfig config = ExperimentConfig::load(dir / "config.ini");
  EvolveOptions o = options;
  o.resume = true;
  return run_evolve(config, workers, dir, o);
}

// --- grid ------------------------------------------------------------------

std::vector<GridCellResult> run_grid(const ExperimentConfig& config, unsigned workers,
                                     const std::optional<fs::path>& out) {
  config.validate();
  const TimeSeries series = build_series(config);
  const auto seeds = run_seeds(config.run);
  const Index cells = config.grid_size();
  std::vector<GridCellResult> results(static_cast<std::size_t>(cells));
  std::vector<ExperimentConfig> points;
  for (Index c = 0; c < cells; ++c) {
    points.push_back(config.grid_point(c));
    auto& cell = results[static_cast<std::size_t>(c)];
    cell.cell = c;
    cell.coordinates = config.grid_coordinates(c);
    cell.record.kind = "baseline";
    cell.record.config_hash = points.back().hash();
    cell.record.runs.resize(seeds.size());
  }
  // job j -> (cell j / repeats, seed j % repeats), independent of scheduling
  const std::size_t jobs = static_cast<std::size_t>(cells) * seeds.size();
  parallel_for(jobs, workers, [&](std::size_t j) {
    const std::size_t c = j / seeds.size();
    const std::size_t k = j % seeds.size();
    SeedResult r;
    try {
      r = baseline_seed(points[c], series, seeds[k]);
    } catch (const std::exception& e) {
      r.seed = seeds[k];
      r.ok = false;
      r.error = e.what();
    }
    r.residuals.clear();
    results[c].record.runs[k] = std::move(r);
  });

  if (out) {
    write_run_header(*out, config);
    std::ofstream table(*out / "grid.csv");
    std::ofstream summary(*out / "grid_summary.csv");
    std::string keys;
    if (!results.empty())
      for (const auto& [key, value] : results.front().coordinates) keys += key + ",";
    table << "cell," << keys << "seed,ok,metric,value\n";
    summary << "cell," << keys << "metric,mean,std,failures\n";
    json doc{{"kind", "grid"}, {"config_hash", config.hash()}, {"version", EVOESN_VERSION}, {"cells", json::array()}};
    char buf[64];
    for (const auto& cell : results) {
      std::string coords = std::to_string(cell.cell) + ",";
      for (const auto& [key, value] : cell.coordinates) coords += format_double(value) + ",";
      for (const auto& r : cell.record.runs) {
        if (!r.ok) {
          table << coords << r.seed << ",false,,\n";
          continue;
        }
        for (const auto& [name, value] : r.metrics) {
          std::snprintf(buf, sizeof buf, "%.17g", value);
          table << coords << r.seed << ",true," << name << "," << buf << "\n";
        }
      }
      for (const auto& name : cell.record.metric_names()) {
        const auto [mean, sd] = cell.record.summary(name);
        summary << coords << name << "," << format_double(mean) << "," << format_double(sd) << ","
                << cell.record.failures() << "\n";
      }
      json c = json::parse(to_json(cell.record));
      c["cell"] = cell.cell;
      c["coordinates"] = json::object();
      for (const auto& [key, value] : cell.coordinates) c["coordinates"][key] = value;
      doc["cells"].push_back(std::move(c));
    }
    write_text(*out / "results.json", doc.dump(2));
  }
  return results;
}

// --- evaluate --------------------------------------------------------------

RunRecord evaluate_saved_model(const ExperimentConfig& config, const fs::path& model_path,
                               const std::optional<fs::path>& out) {
  const auto start = Clock::now();
  const TimeSeries series = build_series(config);
  EsnModel<double> model = load_model(model_path);
  RunRecord record;
  record.kind = "evaluate";
  record.config_hash = config.hash();
  SeedResult r;
  r.seed = model.seed;
  try {
    const TrainedEsn trained = restore_trained(std::move(model), series);
    const EvalReport report =
        evaluate_test(trained, series, config.task.protocol, config.run.variance, config.run.noise_in_free_run);
    r.metrics = report.metrics;
    r.residuals = report.residuals;
    check_metrics(r);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  r.wall_seconds = seconds_since(start);
  record.runs.push_back(std::move(r));
  record.wall_seconds = seconds_since(start);
  if (out) {
    ExperimentConfig recorded = config;
    recorded.run.seed = record.runs.front().seed;
    recorded.run.repeats = 1;
    record.config_hash = recorded.hash();
    write_run_header(*out, recorded);
    if (record.runs.front().ok) write_trace(*out, record.runs.front());
    write_text(*out / "results.json", to_json(record));
  }
  return record;
}

// --- manifest --------------------------------------------------------------

std::vector<std::string> validate_manifest(const fs::path& dir) {
  std::vector<std::string> problems;
  for (const char* name : {"config.ini", "seeds.txt", "results.json"}) {
    if (!fs::exists(dir / name)) problems.push_back(std::string("missing ") + name);
  }
  if (!problems.empty()) return problems;

  ExperimentConfig config;
  try {
    config = ExperimentConfig::load(dir / "config.ini");
  } catch (const std::exception& e) {
    problems.push_back(std::string("config.ini does not parse: ") + e.what());
    return problems;
  }
  json doc;
  try {
    doc = json::parse(read_text(dir / "results.json"));
  } catch (const std::exception& e) {
    problems.push_back(std::string("results.json does not parse: ") + e.what());
    return problems;
  }
  if (doc.value("config_hash", "") != config.hash()) problems.push_back("config hash does not match results.json");

  std::vector<std::uint64_t> listed;
  {
    std::istringstream in(read_text(dir / "seeds.txt"));
    std::uint64_t s = 0;
    while (in >> s) listed.push_back(s);
  }
  if (listed != run_seeds(config.run)) problems.push_back("seeds.txt does not match the configured seeds");

  const std::string kind = doc.value("kind", "");
  if (kind == "grid") {
    if (!fs::exists(dir / "grid.csv")) problems.push_back("missing grid.csv");
    if (!fs::exists(dir / "grid_summary.csv")) problems.push_back("missing grid_summary.csv");
    if (static_cast<Index>(doc.at("cells").size()) != config.grid_size()) problems.push_back("grid cell count mismatch");
    return problems;
  }
  if (kind != "baseline" && kind != "evolve" && kind != "evaluate") {
    problems.push_back("unknown run kind '" + kind + "'");
    return problems;
  }
  std::vector<std::uint64_t> recorded;
  for (const auto& run : doc.at("runs")) {
    const auto seed = run.at("seed").get<std::uint64_t>();
    recorded.push_back(seed);
    const std::string tag = seed_tag(seed);
    if (run.at("ok").get<bool>() && !fs::exists(dir / "traces" / (tag + ".csv"))) {
      problems.push_back("missing trace for " + tag);
    }
    if (kind == "evolve") {
      if (!fs::exists(dir / ("history_" + tag + ".csv"))) problems.push_back("missing history for " + tag);
      if (!fs::exists(dir / ("checkpoint_" + tag + ".bin"))) problems.push_back("missing checkpoint for " + tag);
      if (run.at("ok").get<bool>() && !fs::exists(dir / ("model_" + tag + ".json"))) {
        problems.push_back("missing model for " + tag);
      }
    }
  }
  if (recorded != listed) problems.push_back("results.json runs do not match seeds.txt");
  return problems;
}

}  // namespace evoesn
