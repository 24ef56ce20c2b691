// Command-line front end: generate, baseline, evolve, grid, evaluate, resume.

#include "evoesn/experiment.hpp"
#include "evoesn/parallel.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace evoesn;

namespace {

struct ConfigArgs {
  std::string preset;
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<Index> repeats;
  std::string out;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--preset", args.preset, "Built-in configuration: mgs, lorenz, sunspot")
      ->check(CLI::IsMember({"mgs", "lorenz", "sunspot"}));
  cmd->add_option("--config", args.config_file, "Configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides, "Override, e.g. --set esn.units=500 (repeatable)");
  cmd->add_option("--seed", args.seed, "First run seed");
  cmd->add_option("--repeats", args.repeats, "Number of seeds");
  cmd->add_option("--out", args.out, "Output directory");
}

ExperimentConfig resolve(const ConfigArgs& args) {
  if (args.preset.empty() == args.config_file.empty()) throw ConfigError("give exactly one of --preset or --config");
  ExperimentConfig config = args.preset.empty() ? ExperimentConfig::load(args.config_file) : preset(args.preset);
  config = apply_overrides(config, args.overrides);
  if (args.seed) config.run.seed = *args.seed;
  if (args.repeats) config.run.repeats = *args.repeats;
  if (!args.out.empty()) config.run.output = args.out;
  config.validate();
  return config;
}

void print_record(const RunRecord& record, const std::string& out) {
  for (const auto& r : record.runs) {
    if (!r.ok) std::printf("seed %llu failed: %s\n", static_cast<unsigned long long>(r.seed), r.error.c_str());
  }
  for (const auto& name : record.metric_names()) {
    const auto [mean, sd] = record.summary(name);
    std::printf("%-22s %.6g  (std %.3g)\n", name.c_str(), mean, sd);
  }
  std::printf("runs: %zu  failures: %lld  results: %s/results.json\n", record.runs.size(),
              static_cast<long long>(record.failures()), out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Echo state networks with reservoirs evolved in the DCT domain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EVOESN_VERSION);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a benchmark series to CSV");
  std::string gen_task;
  MgsParams mgs;
  LorenzParams lorenz;
  Index gen_len = 0;
  std::uint64_t gen_seed = 42;
  std::string gen_out;
  std::string integrator = "rk4";
  gen->add_option("task", gen_task, "mgs or lorenz")->required()->check(CLI::IsMember({"mgs", "lorenz"}));
  gen->add_option("--len", gen_len, "Number of samples (default 6084 for mgs, 8600 for lorenz)");
  gen->add_option("--tau", mgs.tau, "Mackey-Glass delay");
  gen->add_option("--step", mgs.integration_step, "Mackey-Glass integration step");
  gen->add_option("--integrator", integrator, "Mackey-Glass integrator")->check(CLI::IsMember({"rk4", "euler"}));
  gen->add_option("--seed", gen_seed, "Seed of the Mackey-Glass history");
  gen->add_option("--out", gen_out, "Output CSV (default <task>.csv)");

  ConfigArgs base_args, evo_args, grid_args, eval_args;
  auto* baseline = app.add_subcommand("baseline", "Train and test randomly initialized ESNs over seeds");
  add_config_options(baseline, base_args);

  auto* evolve = app.add_subcommand("evolve", "Evolve reservoirs and test the hall of fame");
  add_config_options(evolve, evo_args);
  std::optional<Index> stop_at;
  bool verbose = false;
  evolve->add_option("--stop-at", stop_at, "Stop at this generation (resume later)");
  evolve->add_flag("-v,--verbose", verbose, "Print per-generation progress");

  auto* grid = app.add_subcommand("grid", "Evaluate the Cartesian product of gridded parameters");
  add_config_options(grid, grid_args);

  auto* evaluate = app.add_subcommand("evaluate", "Test a saved model on the configured task");
  add_config_options(evaluate, eval_args);
  std::string model_path;
  evaluate->add_option("--model", model_path, "Model JSON written by evolve")->required()->check(CLI::ExistingFile);

  auto* resume = app.add_subcommand("resume", "Continue an interrupted evolve run");
  std::string resume_dir;
  bool resume_verbose = false;
  resume->add_option("dir", resume_dir, "Output directory of the run")->required()->check(CLI::ExistingDirectory);
  resume->add_flag("-v,--verbose", resume_verbose, "Print per-generation progress");

  ConfigArgs show_args;
  auto* show = app.add_subcommand("show", "Print the resolved configuration and its hash");
  add_config_options(show, show_args);

  CLI11_PARSE(app, argc, argv);

  try {
    const unsigned workers = default_workers();
    if (gen->parsed()) {
      if (gen_out.empty()) gen_out = gen_task + ".csv";
      TimeSeries series;
      if (gen_task == "mgs") {
        mgs.integrator = integrator == "euler" ? DdeIntegrator::euler : DdeIntegrator::rk4;
        series = generate_mackey_glass(mgs, gen_len > 0 ? gen_len : 6084, gen_seed);
      } else {
        series = generate_lorenz(lorenz, gen_len > 0 ? gen_len : 8600);
      }
      write_series_csv(gen_out, series);
      std::printf("wrote %lld samples to %s\n", static_cast<long long>(series.length()), gen_out.c_str());
    } else if (baseline->parsed()) {
      const auto config = resolve(base_args);
      print_record(run_baseline(config, workers, config.run.output), config.run.output);
    } else if (evolve->parsed()) {
      const auto config = resolve(evo_args);
      EvolveOptions options;
      options.stop_at = stop_at;
      options.verbose = verbose;
      print_record(run_evolve(config, workers, config.run.output, options), config.run.output);
    } else if (grid->parsed()) {
      const auto config = resolve(grid_args);
      const auto cells = run_grid(config, workers, config.run.output);
      std::size_t failures = 0;
      for (const auto& c : cells) failures += static_cast<std::size_t>(c.record.failures());
      std::printf("cells: %zu  failed runs: %zu  table: %s/grid.csv\n", cells.size(), failures,
                  config.run.output.c_str());
    } else if (evaluate->parsed()) {
      const auto config = resolve(eval_args);
      print_record(evaluate_saved_model(config, model_path, config.run.output), config.run.output);
    } else if (show->parsed()) {
      const auto config = resolve(show_args);
      std::printf("# hash %s, %lld grid cell(s)\n%s", config.hash().c_str(), static_cast<long long>(config.grid_size()),
                  config.serialize().c_str());
    } else if (resume->parsed()) {
      EvolveOptions options;
      options.verbose = resume_verbose;
      print_record(resume_evolve(resume_dir, workers, options), resume_dir);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
