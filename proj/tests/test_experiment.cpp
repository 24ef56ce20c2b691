#include "evoesn/experiment.hpp"
#include "evoesn/model_io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace evoesn;
namespace fs = std::filesystem;

namespace {

// A quick MGS configuration: small reservoir, short splits.
ExperimentConfig tiny_mgs() {
  return apply_overrides(preset("mgs"), {"esn.units=40", "esn.ridge_lambda=1e-6", "task.washout=100", "task.train=400", "task.validate=300",
                                         "task.test=84", "evolution.coefficients=20", "evolution.fitness_tasks=3",
                                         "evolution.fitness_horizon=50", "ga.population=6", "ga.generations=3",
                                         "run.repeats=2", "ga.checkpoint_every=1"});
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EVOESN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("baseline is deterministic and writes a valid manifest") {
  const auto config = tiny_mgs();
  const auto dir = fresh_dir("evoesn_baseline_test");
  const auto a = run_baseline(config, 2, dir);
  const auto b = run_baseline(config, 1);
  CHECK(a.runs.size() == 2);
  CHECK(a.failures() == 0);
  CHECK(same_results(a, b, 0.0));
  CHECK(a.runs[0].metrics.count("nrmse_horizon"));
  CHECK(a.runs[0].metrics.at("nrmse_horizon") < 1.0);
  CHECK(validate_manifest(dir).empty());
  CHECK(to_json(a, false) == to_json(b, false));

  fs::remove(dir / "traces" / "seed1.csv");
  CHECK_FALSE(validate_manifest(dir).empty());
  fs::remove_all(dir);
}

TEST_CASE("a one-point grid equals the baseline") {
  const auto config = tiny_mgs();
  const auto cells = run_grid(config, 2);
  REQUIRE(cells.size() == 1);
  const auto base = run_baseline(config, 1);
  CHECK(same_results(cells[0].record, base, 0.0));
}

TEST_CASE("grid records per-cell failures and keeps going") {
  auto config = apply_overrides(tiny_mgs(), {"esn.density=0.2,0.0001", "run.repeats=1"});
  const auto dir = fresh_dir("evoesn_grid_test");
  const auto cells = run_grid(config, 1, dir);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].record.failures() == 0);
  CHECK(cells[1].record.failures() == 1);
  CHECK(validate_manifest(dir).empty());
  CHECK(fs::exists(dir / "grid.csv"));
  fs::remove_all(dir);
}

TEST_CASE("zero generations gives the best of the initial ensemble") {
  auto config = apply_overrides(tiny_mgs(), {"ga.generations=0", "run.repeats=1"});
  const auto series = build_series(config);
  const EvoProblem problem(init_esn<double>(resolved_hyper(config, series), 1), series, resolved_evo_settings(config));
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < config.ga.population_size; ++i) best = std::min(best, problem.evaluate(problem.initial_genes(i)).value);
  const auto record = run_evolve(config, 1);
  CHECK(record.runs[0].metrics.at("fitness") == best);
  CHECK(record.runs[0].history.size() == 1);
}

TEST_CASE("evolve, interrupt and resume matches a straight run") {
  auto config = apply_overrides(tiny_mgs(), {"run.repeats=1", "ga.generations=4"});
  const auto straight = run_evolve(config, 1);
  const auto dir = fresh_dir("evoesn_resume_test");
  EvolveOptions first;
  first.stop_at = 2;
  run_evolve(config, 1, dir, first);
  CHECK(load_checkpoint(dir / "checkpoint_seed1.bin").generation == 2);
  const auto resumed = resume_evolve(dir, 1);
  CHECK(same_results(straight, resumed, 0.0));
  CHECK(validate_manifest(dir).empty());

  // the saved hall-of-fame model reproduces the recorded test metrics
  const auto eval = evaluate_saved_model(config, dir / "model_seed1.json");
  CHECK(eval.runs[0].metrics.at("nrmse_horizon") == resumed.runs[0].metrics.at("nrmse_horizon"));

  // a checkpoint from another experiment is refused
  auto other = apply_overrides(config, {"esn.input_bias=0.3"});
  EvolveOptions again;
  again.resume = true;
  CHECK_THROWS_AS(run_evolve(other, 1, dir, again), LoadError);
  fs::remove_all(dir);
}

TEST_CASE("model documents round trip") {
  auto hyper = tiny_mgs().esn;
  hyper.feedback = true;
  auto model = init_esn<double>(hyper, 3);
  model.readout = Matrix<double>::Random(1, model.input_dim() + model.units());
  const auto back = model_from_json(model_to_json(model));
  CHECK(back.layout == model.layout);
  CHECK(Matrix<double>(back.reservoir) == Matrix<double>(model.reservoir));
  CHECK(back.input_weights == model.input_weights);
  CHECK(*back.feedback_weights == *model.feedback_weights);
  CHECK(*back.readout == *model.readout);
  CHECK(back.seed == 3);
  CHECK(*back.hyper.spectral_radius == *model.hyper.spectral_radius);
  CHECK_THROWS_AS(model_from_json("{}"), LoadError);
  CHECK_THROWS_AS(model_from_json("not json"), LoadError);
}

TEST_CASE("sunspot preset builds the bundled series") {
  const auto s = build_series(preset("sunspot"));
  CHECK(s.length() == 3177);
  CHECK(s.splits.washout == 100);
}

TEST_CASE("command line") {
  const auto dir = fresh_dir("evoesn_cli_test");
  fs::create_directories(dir);
  CHECK(run_cli("generate mgs --tau 17 --len 6084 --out " + (dir / "mgs.csv").string()) == 0);
  const auto mgs = read_series_csv(dir / "mgs.csv");
  CHECK(mgs.length() == 6084);
  CHECK(run_cli("generate lorenz --len 8600 --out " + (dir / "lorenz.csv").string()) == 0);
  CHECK(read_series_csv(dir / "lorenz.csv").length() == 8600);
  CHECK(run_cli("generate weather") != 0);
  CHECK(run_cli("") != 0);
  CHECK(run_cli("baseline") != 0);
  CHECK(run_cli("baseline --preset mgs --set esn.units=-3") != 0);

  tiny_mgs().save(dir / "tiny.ini");
  const auto out = dir / "run";
  CHECK(run_cli("baseline --config " + (dir / "tiny.ini").string() + " --seed 5 --out " + out.string()) == 0);
  CHECK(validate_manifest(out).empty());
  CHECK(ExperimentConfig::load(out / "config.ini").run.seed == 5);

  const auto evo = dir / "evo";
  CHECK(run_cli("evolve --config " + (dir / "tiny.ini").string() + " --repeats 1 --stop-at 1 --out " + evo.string()) ==
        0);
  CHECK(run_cli("resume " + evo.string()) == 0);
  CHECK(validate_manifest(evo).empty());
  CHECK(load_checkpoint(evo / "checkpoint_seed1.bin").generation == 3);
  CHECK(run_cli("evaluate --config " + (dir / "tiny.ini").string() + " --model " + (evo / "model_seed1.json").string() +
                " --out " + (dir / "eval").string()) == 0);
  CHECK(validate_manifest(dir / "eval").empty());
  fs::remove_all(dir);
}

}
