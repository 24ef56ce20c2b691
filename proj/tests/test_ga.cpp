#include "evoesn/ga.hpp"
#include "oracles.hpp"

#include <atomic>
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

using namespace evoesn;

namespace {

FitnessResult sphere(const Vector<double>& g) { return {g.squaredNorm(), false}; }

std::function<Vector<double>(Index)> random_seeder(std::uint64_t seed, Index size) {
  return [=](Index i) {
    Rng rng = make_rng(seed, 500 + static_cast<std::uint64_t>(i));
    return oracle::random_vector(size, rng, 3.0);
  };
}

GaConfig small_config(Index generations) {
  GaConfig c;
  c.population_size = 12;
  c.generations = generations;
  return c;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST_SUITE("ga") {

TEST_CASE("tournament returns the best of the drawn contestants") {
  std::vector<Individual> pop(6);
  for (std::size_t i = 0; i < pop.size(); ++i) pop[i].fitness = static_cast<double>(10 - i);
  Rng rng = make_rng(1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Rng replay = rng;
    const Index winner = tournament_select(pop, 3, rng);
    std::uniform_int_distribution<Index> pick(0, 5);
    Index best = pick(replay);
    for (int k = 1; k < 3; ++k) best = std::max(best, pick(replay));
    CHECK(winner == best);
  }
  Rng one = make_rng(1, 2);
  CHECK(tournament_select(pop, 6, one) >= 0);
}

TEST_CASE("two-point crossover swaps one contiguous segment") {
  Rng rng = make_rng(2, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Vector<double> a = Vector<double>::LinSpaced(10, 0, 9);
    Vector<double> b = -a - Vector<double>::Ones(10);
    const Vector<double> a0 = a, b0 = b;
    two_point_crossover(a, b, rng);
    Index changes = 0;
    bool inside = false;
    for (Index i = 0; i < 10; ++i) {
      const bool swapped = a(i) == b0(i);
      CHECK((swapped ? b(i) == a0(i) : (a(i) == a0(i) && b(i) == b0(i))));
      if (swapped != inside) ++changes;
      inside = swapped;
    }
    CHECK(changes <= 2);
    CHECK(a(0) == a0(0));  // first cut point is at least 1
  }
}

TEST_CASE("gaussian mutation perturbs every gene with the given spread") {
  Rng rng = make_rng(3, 1);
  Vector<double> g = Vector<double>::Zero(20000);
  gaussian_mutation(g, 0.5, rng);
  CHECK((g.array() != 0.0).all());
  CHECK(std::abs(std::sqrt(g.squaredNorm() / 20000.0) - 0.5) < 0.01);
}

TEST_CASE("generation 0 is the seeded ensemble and the hall of fame is its best") {
  const auto state = init_population(small_config(0), random_seeder(4, 6), sphere, 4);
  CHECK(state.population.size() == 12);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(state.population[i].genes == random_seeder(4, 6)(static_cast<Index>(i)));
    best = std::min(best, *state.population[i].fitness);
  }
  CHECK(*state.hall_of_fame.fitness == best);
  CHECK(state.history.size() == 1);
  CHECK(state.mutation_sigma > 0.0);
}

TEST_CASE("hall of fame never gets worse and the population size is constant") {
  auto config = small_config(40);
  auto state = init_population(config, random_seeder(5, 8), sphere, 5);
  run_ga(state, config, sphere, 1);
  CHECK(state.population.size() == 12);
  for (std::size_t g = 1; g < state.history.size(); ++g) {
    CHECK(state.history[g].hall_of_fame <= state.history[g - 1].hall_of_fame);
    CHECK(state.history[g].hall_of_fame <= state.history[g].best);
  }
  CHECK(state.history.back().hall_of_fame < 0.5 * state.history.front().hall_of_fame);
}

TEST_CASE("runs are reproducible and independent of the worker count") {
  auto config = small_config(15);
  auto a = init_population(config, random_seeder(6, 5), sphere, 6, 1);
  auto b = init_population(config, random_seeder(6, 5), sphere, 6, 4);
  run_ga(a, config, sphere, 1);
  run_ga(b, config, sphere, 4);
  CHECK(a.population == b.population);
  CHECK(a.hall_of_fame == b.hall_of_fame);
}

TEST_CASE("only changed individuals are re-evaluated") {
  auto config = small_config(10);
  config.crossover_prob = 0.0;
  config.mutation_prob = 0.0;
  std::atomic<int> calls{0};
  const FitnessFunction counting = [&](const Vector<double>& g) {
    ++calls;
    return sphere(g);
  };
  auto state = init_population(config, random_seeder(7, 4), counting, 7);
  CHECK(calls == 12);
  run_ga(state, config, counting, 1);
  CHECK(calls == 12);
}

TEST_CASE("stall rule stops a flat run") {
  auto config = small_config(100);
  config.stall_generations = 5;
  const FitnessFunction flat = [](const Vector<double>&) { return FitnessResult{1.0, false}; };
  auto state = init_population(config, random_seeder(8, 3), flat, 8);
  run_ga(state, config, flat, 1);
  CHECK(state.generation == 5);
  CHECK(state.converged(config));
}

TEST_CASE("elite reinjection keeps the hall of fame in the population") {
  auto config = small_config(10);
  config.reinject_elite = true;
  auto state = init_population(config, random_seeder(9, 4), sphere, 9);
  run_ga(state, config, sphere, 1, [](const GaState& s) {
    CHECK(std::find(s.population.begin(), s.population.end(), s.hall_of_fame) != s.population.end());
  });
}

TEST_CASE("checkpoint round trip and staged resume") {
  auto config = small_config(20);
  auto straight = init_population(config, random_seeder(10, 6), sphere, 10);
  run_ga(straight, config, sphere, 1);

  auto staged = init_population(config, random_seeder(10, 6), sphere, 10);
  staged.fingerprint = "test";
  run_ga(staged, config, sphere, 1, {}, 10);
  CHECK(staged.generation == 10);
  const auto path = temp_file("evoesn_ckpt_test.bin");
  save_checkpoint(staged, path);
  auto resumed = load_checkpoint(path);
  CHECK(resumed.fingerprint == "test");
  CHECK(resumed.population == staged.population);
  CHECK(resumed.history.size() == staged.history.size());
  run_ga(resumed, config, sphere, 1);
  CHECK(resumed.generation == 20);
  CHECK(resumed.hall_of_fame == straight.hall_of_fame);
  CHECK(resumed.population == straight.population);
  std::filesystem::remove(path);
}

TEST_CASE("damaged checkpoints are rejected") {
  auto state = init_population(small_config(0), random_seeder(11, 4), sphere, 11);
  const std::string good = serialize_state(state);
  CHECK(deserialize_state(good).population == state.population);

  std::string magic = good;
  magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_state(magic), LoadError);

  std::string version = good;
  version[8] = 9;
  CHECK_THROWS_AS(deserialize_state(version), LoadError);

  CHECK_THROWS_AS(deserialize_state(good.substr(0, good.size() - 5)), LoadError);

  std::string flipped = good;
  flipped[good.size() - 3] ^= 0x10;
  CHECK_THROWS_AS(deserialize_state(flipped), LoadError);

  CHECK_THROWS_AS(deserialize_state(""), LoadError);
  CHECK_THROWS_AS(load_checkpoint(temp_file("evoesn_no_such_checkpoint.bin")), LoadError);
}

TEST_CASE("configuration checks") {
  GaConfig c;
  c.population_size = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = GaConfig{};
  c.tournament_size = 21;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = GaConfig{};
  c.crossover_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = GaConfig{};
  c.mutation_prob = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

}
