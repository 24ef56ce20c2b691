#include "evoesn/ga.hpp"

#include "evoesn/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace evoesn {

void GaConfig::validate() const {
  if (population_size < 2) throw ConfigError("ga: population_size must be at least 2");
  if (generations < 0) throw ConfigError("ga: generations must be nonnegative");
  if (tournament_size < 1 || tournament_size > population_size) {
    throw ConfigError("ga: tournament_size must lie in [1, population_size]");
  }
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) throw ConfigError("ga: crossover_prob must lie in [0, 1]");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) throw ConfigError("ga: mutation_prob must lie in [0, 1]");
  if (mutation_sigma && !(*mutation_sigma > 0.0)) throw ConfigError("ga: mutation_sigma must be positive");
  if (!(mutation_sigma_factor > 0.0)) throw ConfigError("ga: mutation_sigma_factor must be positive");
  if (stall_generations < 1) throw ConfigError("ga: stall_generations must be positive");
}

bool GaState::converged(const GaConfig& config) const {
  const auto window = static_cast<std::size_t>(config.stall_generations);
  if (history.size() <= window) return false;
  const double before = history[history.size() - 1 - window].hall_of_fame;
  const double now = history.back().hall_of_fame;
  return (before - now) < config.stall_tolerance * std::abs(before);
}

Index evaluate_population(std::vector<Individual>& population, const FitnessFunction& fitness, unsigned workers) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < population.size(); ++i)
    if (!population[i].fitness) pending.push_back(i);
  parallel_for(pending.size(), workers, [&](std::size_t k) {
    Individual& ind = population[pending[k]];
    const FitnessResult r = fitness(ind.genes);
    ind.fitness = r.value;
    ind.diverged = r.diverged;
  });
  return static_cast<Index>(pending.size());
}

Index tournament_select(const std::vector<Individual>& population, Index tournament_size, Rng& rng) {
  std::uniform_int_distribution<Index> pick(0, static_cast<Index>(population.size()) - 1);
  std::vector<Index> best;
  double best_fitness = 0.0;
  for (Index k = 0; k < tournament_size; ++k) {
    const Index i = pick(rng);
    const double f = population[static_cast<std::size_t>(i)].fitness.value();
    if (best.empty() || f < best_fitness) {
      best.assign(1, i);
      best_fitness = f;
    } else if (f == best_fitness) {
      best.push_back(i);
    }
  }
  if (best.size() == 1) return best.front();
  std::uniform_int_distribution<std::size_t> tie(0, best.size() - 1);
  return best[tie(rng)];
}

void two_point_crossover(Vector<double>& a, Vector<double>& b, Rng& rng) {
  const Index size = std::min(a.size(), b.size());
  if (size < 2) return;
  Index first = std::uniform_int_distribution<Index>(1, size)(rng);
  Index second = std::uniform_int_distribution<Index>(1, size - 1)(rng);
  if (second >= first) {
    ++second;
  } else {
    std::swap(first, second);
  }
  a.segment(first, second - first).swap(b.segment(first, second - first));
}

void gaussian_mutation(Vector<double>& genes, double sigma, Rng& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  for (Index i = 0; i < genes.size(); ++i) genes(i) += noise(rng);
}

namespace {

void update_hall_of_fame(GaState& state) {
  for (const auto& ind : state.population) {
    if (!state.hall_of_fame.fitness || *ind.fitness < *state.hall_of_fame.fitness) state.hall_of_fame = ind;
  }
}

void record_generation(GaState& state, Index evaluations, double seconds) {
  GenerationRecord r;
  r.generation = state.generation;
  r.evaluations = evaluations;
  r.wall_seconds = seconds;
  double sum = 0.0;
  r.best = *state.population.front().fitness;
  for (const auto& ind : state.population) {
    sum += *ind.fitness;
    r.best = std::min(r.best, *ind.fitness);
    if (ind.diverged) ++r.diverged;
  }
  const auto n = static_cast<double>(state.population.size());
  r.mean = sum / n;
  double ss = 0.0;
  for (const auto& ind : state.population) ss += (*ind.fitness - r.mean) * (*ind.fitness - r.mean);
  r.std = std::sqrt(ss / n);
  r.hall_of_fame = *state.hall_of_fame.fitness;
  state.history.push_back(r);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

GaState init_population(const GaConfig& config, const std::function<Vector<double>(Index)>& seeder,
                        const FitnessFunction& fitness, std::uint64_t seed, unsigned workers) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  GaState state;
  state.seed = seed;
  state.rng = make_rng(seed, 0x6a);
  state.population.resize(static_cast<std::size_t>(config.population_size));
  for (Index i = 0; i < config.population_size; ++i) {
    state.population[static_cast<std::size_t>(i)].genes = seeder(i);
  }
  const Index size = state.chromosome_size();
  for (const auto& ind : state.population) {
    if (ind.genes.size() != size || size < 1) throw ConfigError("ga: seeder produced inconsistent chromosomes");
  }
  if (config.mutation_sigma) {
    state.mutation_sigma = *config.mutation_sigma;
  } else {
    double sum = 0.0, ss = 0.0;
    Index n = 0;
    for (const auto& ind : state.population) {
      sum += ind.genes.sum();
      n += ind.genes.size();
    }
    const double mean = sum / static_cast<double>(n);
    for (const auto& ind : state.population) ss += (ind.genes.array() - mean).square().sum();
    const double spread = std::sqrt(ss / static_cast<double>(n));
    state.mutation_sigma = config.mutation_sigma_factor * (spread > 0.0 ? spread : 1.0);
  }
  const Index evaluations = evaluate_population(state.population, fitness, workers);
  update_hall_of_fame(state);
  record_generation(state, evaluations, seconds_since(t0));
  return state;
}

void run_ga(GaState& state, const GaConfig& config, const FitnessFunction& fitness, unsigned workers,
            const GenerationCallback& on_generation, std::optional<Index> stop_at) {
  config.validate();
  if (state.population.size() != static_cast<std::size_t>(config.population_size)) {
    throw ConfigError("ga: state population size differs from the configuration");
  }
  Index target = config.generations;
  if (stop_at) target = std::min(target, *stop_at);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  while (state.generation < target && !state.converged(config)) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto pop = static_cast<std::size_t>(config.population_size);

    std::vector<Individual> offspring;
    offspring.reserve(pop);
    for (std::size_t i = 0; i < pop; ++i) {
      offspring.push_back(state.population[static_cast<std::size_t>(
          tournament_select(state.population, config.tournament_size, state.rng))]);
    }
    for (std::size_t i = 1; i < pop; i += 2) {
      if (coin(state.rng) < config.crossover_prob) {
        two_point_crossover(offspring[i - 1].genes, offspring[i].genes, state.rng);
        offspring[i - 1].fitness.reset();
        offspring[i].fitness.reset();
      }
    }
    for (auto& ind : offspring) {
      if (coin(state.rng) < config.mutation_prob) {
        gaussian_mutation(ind.genes, state.mutation_sigma, state.rng);
        ind.fitness.reset();
      }
    }
    const Index evaluations = evaluate_population(offspring, fitness, workers);
    state.population = std::move(offspring);
    update_hall_of_fame(state);
    if (config.reinject_elite) {
      auto worst = std::max_element(state.population.begin(), state.population.end(),
                                    [](const Individual& a, const Individual& b) { return *a.fitness < *b.fitness; });
      *worst = state.hall_of_fame;
    }
    ++state.generation;
    record_generation(state, evaluations, seconds_since(t0));
    if (on_generation) on_generation(state);
  }
}

// --- checkpoint ------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'E', 'V', 'O', 'E', 'S', 'N', 'C', 'K'};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void put(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.append(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    out_.append(s);
  }
  void put_individual(const Individual& ind) {
    put<std::int64_t>(ind.genes.size());
    out_.append(reinterpret_cast<const char*>(ind.genes.data()), sizeof(double) * static_cast<std::size_t>(ind.genes.size()));
    put<std::uint8_t>(ind.fitness.has_value());
    put<double>(ind.fitness.value_or(0.0));
    put<std::uint8_t>(ind.diverged);
  }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Individual get_individual() {
    Individual ind;
    const auto n = get<std::int64_t>();
    if (n < 0) throw LoadError("checkpoint: negative chromosome length");
    need(static_cast<std::size_t>(n) * sizeof(double));
    ind.genes.resize(n);
    std::memcpy(ind.genes.data(), bytes_.data() + pos_, static_cast<std::size_t>(n) * sizeof(double));
    pos_ += static_cast<std::size_t>(n) * sizeof(double);
    const bool has = get<std::uint8_t>() != 0;
    const double f = get<double>();
    if (has) ind.fitness = f;
    ind.diverged = get<std::uint8_t>() != 0;
    return ind;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw LoadError("checkpoint: truncated payload");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_state(const GaState& state) {
  Writer payload;
  payload.put<std::uint64_t>(state.seed);
  payload.put<std::int64_t>(state.generation);
  payload.put<double>(state.mutation_sigma);
  std::ostringstream rng_text;
  rng_text << state.rng;
  payload.put_string(rng_text.str());
  payload.put_string(state.fingerprint);
  payload.put<std::uint64_t>(state.population.size());
  for (const auto& ind : state.population) payload.put_individual(ind);
  payload.put_individual(state.hall_of_fame);
  payload.put<std::uint64_t>(state.history.size());
  for (const auto& r : state.history) {
    payload.put<std::int64_t>(r.generation);
    payload.put<double>(r.best);
    payload.put<double>(r.mean);
    payload.put<double>(r.std);
    payload.put<double>(r.hall_of_fame);
    payload.put<std::int64_t>(r.evaluations);
    payload.put<std::int64_t>(r.diverged);
    payload.put<double>(r.wall_seconds);
  }

  Writer file;
  file.bytes().append(kMagic, sizeof kMagic);
  file.put<std::uint32_t>(kCheckpointVersion);
  file.put<std::uint64_t>(payload.bytes().size());
  file.put<std::uint64_t>(fnv1a(payload.bytes()));
  file.bytes().append(payload.bytes());
  return std::move(file.bytes());
}

GaState deserialize_state(const std::string& bytes) {
  Reader header(bytes);
  if (bytes.size() < sizeof kMagic + 20 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw LoadError("checkpoint: not an evoesn checkpoint");
  }
  for (std::size_t i = 0; i < sizeof kMagic; ++i) header.get<char>();
  const auto version = header.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw LoadError("checkpoint: version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  const auto size = header.get<std::uint64_t>();
  const auto checksum = header.get<std::uint64_t>();
  const std::size_t offset = sizeof kMagic + 4 + 8 + 8;
  if (bytes.size() - offset != size) throw LoadError("checkpoint: payload size mismatch (truncated file?)");
  const std::string payload = bytes.substr(offset);
  if (fnv1a(payload) != checksum) throw LoadError("checkpoint: checksum mismatch (corrupted file)");

  Reader in(payload);
  GaState state;
  state.seed = in.get<std::uint64_t>();
  state.generation = in.get<std::int64_t>();
  state.mutation_sigma = in.get<double>();
  std::istringstream rng_text(in.get_string());
  rng_text >> state.rng;
  if (rng_text.fail()) throw LoadError("checkpoint: unreadable RNG state");
  state.fingerprint = in.get_string();
  const auto count = in.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < count; ++i) state.population.push_back(in.get_individual());
  state.hall_of_fame = in.get_individual();
  const auto records = in.get<std::uint64_t>();
  for (std::uint64_t i = 0; i < records; ++i) {
    GenerationRecord r;
    r.generation = in.get<std::int64_t>();
    r.best = in.get<double>();
    r.mean = in.get<double>();
    r.std = in.get<double>();
    r.hall_of_fame = in.get<double>();
    r.evaluations = in.get<std::int64_t>();
    r.diverged = in.get<std::int64_t>();
    r.wall_seconds = in.get<double>();
    state.history.push_back(r);
  }
  if (!in.done()) throw LoadError("checkpoint: trailing bytes");
  return state;
}

void save_checkpoint(const GaState& state, const std::filesystem::path& path) {
  const std::string bytes = serialize_state(state);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write checkpoint " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ConfigError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

GaState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_state(buffer.str());
}

}  // namespace evoesn
