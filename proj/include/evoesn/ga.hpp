#pragma once

// Generational genetic algorithm over real-valued chromosomes:
// tournament selection, two-point crossover on mated pairs, element-wise
// Gaussian mutation, re-evaluation of changed individuals, hall of fame.

#include "evoesn/common.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace evoesn {

struct FitnessResult {
  double value = 0.0;
  bool diverged = false;
};

/// Must be safe to call concurrently from several threads.
using FitnessFunction = std::function<FitnessResult(const Vector<double>&)>;

struct GaConfig {
  Index population_size = 20;
  Index generations = 70;
  Index tournament_size = 3;
  double crossover_prob = 0.5;
  double mutation_prob = 0.15;
  /// Absolute mutation std; unset means factor * std of generation-0 genes.
  std::optional<double> mutation_sigma;
  double mutation_sigma_factor = 0.1;
  /// Stop early when the hall of fame improves by less than
  /// `stall_tolerance` (relative) over `stall_generations` generations.
  Index stall_generations = 25;
  double stall_tolerance = 1e-6;
  /// Copy the hall of fame over the worst offspring every generation.
  bool reinject_elite = false;

  void validate() const;
};

struct Individual {
  Vector<double> genes;
  std::optional<double> fitness;
  bool diverged = false;

  friend bool operator==(const Individual& a, const Individual& b) {
    return a.genes.size() == b.genes.size() && a.genes == b.genes && a.fitness == b.fitness &&
           a.diverged == b.diverged;
  }
};

struct GenerationRecord {
  Index generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double hall_of_fame = 0.0;
  Index evaluations = 0;
  Index diverged = 0;
  double wall_seconds = 0.0;
};

struct GaState {
  std::uint64_t seed = 0;
  Index generation = 0;
  std::vector<Individual> population;
  Individual hall_of_fame;
  double mutation_sigma = 0.0;
  Rng rng;
  std::vector<GenerationRecord> history;
  /// Identifies the experiment the state belongs to (e.g. a config hash).
  std::string fingerprint;

  Index chromosome_size() const { return population.empty() ? 0 : population.front().genes.size(); }
  bool converged(const GaConfig& config) const;
};

/// Per-generation observer, called after generation 0 and after each
/// later generation.
using GenerationCallback = std::function<void(const GaState&)>;

/// Builds generation 0 from `seeder(i)` and evaluates it.
GaState init_population(const GaConfig& config, const std::function<Vector<double>(Index)>& seeder,
                        const FitnessFunction& fitness, std::uint64_t seed, unsigned workers = 1);

/// Advances `state` until `config.generations` (or `stop_at`, if smaller)
/// or the stall rule fires.
void run_ga(GaState& state, const GaConfig& config, const FitnessFunction& fitness, unsigned workers = 1,
            const GenerationCallback& on_generation = {}, std::optional<Index> stop_at = std::nullopt);

/// Evaluates every individual without a fitness. Returns the count.
Index evaluate_population(std::vector<Individual>& population, const FitnessFunction& fitness, unsigned workers);

// Variation operators, exposed for testing.
Index tournament_select(const std::vector<Individual>& population, Index tournament_size, Rng& rng);
void two_point_crossover(Vector<double>& a, Vector<double>& b, Rng& rng);
void gaussian_mutation(Vector<double>& genes, double sigma, Rng& rng);

// --- checkpoint ------------------------------------------------------------

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Versioned binary container with a payload checksum; written to a
/// temporary file and renamed into place.
void save_checkpoint(const GaState& state, const std::filesystem::path& path);

/// Throws LoadError on a missing file, bad magic, version mismatch, size or
/// checksum mismatch. Nothing is returned unless the whole file is valid.
GaState load_checkpoint(const std::filesystem::path& path);

std::string serialize_state(const GaState& state);
GaState deserialize_state(const std::string& bytes);

}  // namespace evoesn
