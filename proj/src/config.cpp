#include "evoesn/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#ifndef EVOESN_DATA_DIR_DEFAULT
#define EVOESN_DATA_DIR_DEFAULT "data"
#endif

namespace evoesn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* begin = t.data();
  if (!t.empty() && t.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw ConfigError("not a number: '" + text + "'");
  return v;
}

std::int64_t to_int(const std::string& text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw ConfigError("not an integer: '" + text + "'");
  return v;
}

std::uint64_t to_u64(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw ConfigError("not an unsigned integer: '" + text + "'");
  return v;
}

bool to_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError("not a boolean: '" + text + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::string join(const std::vector<double>& values) {
  std::string out;
  for (double v : values) out += (out.empty() ? "" : ", ") + format_double(v);
  return out;
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

double& grid_scalar(ExperimentConfig& c, const std::string& key) {
  if (key == "density") return c.esn.density;
  if (key == "leak_rate") return c.esn.leak_rate;
  if (key == "ridge_lambda") return c.ridge_lambda;
  if (key == "input_scaling") return c.esn.input_scaling;
  throw ConfigError("not a grid key: " + key);
}

Field grid_field(const char* key) {
  return {"esn", key,
          [key](const ExperimentConfig& c) {
            auto it = c.grids.find(key);
            if (it != c.grids.end()) return join(it->second);
            return format_double(grid_scalar(const_cast<ExperimentConfig&>(c), key));
          },
          [key](ExperimentConfig& c, const std::string& v) {
            auto values = parse_value_list(v);
            grid_scalar(c, key) = values.front();
            c.grids[key] = std::move(values);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    auto dbl = [&](const char* s, const char* k, std::function<double&(ExperimentConfig&)> ref) {
      f.push_back({s, k, [ref](const ExperimentConfig& c) { return format_double(ref(const_cast<ExperimentConfig&>(c))); },
                   [ref](ExperimentConfig& c, const std::string& v) { ref(c) = to_double(v); }});
    };
    auto idx = [&](const char* s, const char* k, std::function<Index&(ExperimentConfig&)> ref) {
      f.push_back({s, k, [ref](const ExperimentConfig& c) { return std::to_string(ref(const_cast<ExperimentConfig&>(c))); },
                   [ref](ExperimentConfig& c, const std::string& v) { ref(c) = static_cast<Index>(to_int(v)); }});
    };
    auto boolean = [&](const char* s, const char* k, std::function<bool&(ExperimentConfig&)> ref) {
      f.push_back({s, k, [ref](const ExperimentConfig& c) { return from_bool(ref(const_cast<ExperimentConfig&>(c))); },
                   [ref](ExperimentConfig& c, const std::string& v) { ref(c) = to_bool(v); }});
    };
    auto text = [&](const char* s, const char* k, std::function<std::string&(ExperimentConfig&)> ref) {
      f.push_back({s, k, [ref](const ExperimentConfig& c) { return ref(const_cast<ExperimentConfig&>(c)); },
                   [ref](ExperimentConfig& c, const std::string& v) { ref(c) = trim(v); }});
    };
    auto u64 = [&](const char* s, const char* k, std::function<std::uint64_t&(ExperimentConfig&)> ref) {
      f.push_back({s, k, [ref](const ExperimentConfig& c) { return std::to_string(ref(const_cast<ExperimentConfig&>(c))); },
                   [ref](ExperimentConfig& c, const std::string& v) { ref(c) = to_u64(v); }});
    };

    text("task", "name", [](auto& c) -> auto& { return c.task.name; });
    text("task", "file", [](auto& c) -> auto& { return c.task.file; });
    u64("task", "data_seed", [](auto& c) -> auto& { return c.task.data_seed; });
    idx("task", "length", [](auto& c) -> auto& { return c.task.length; });
    idx("task", "washout", [](auto& c) -> auto& { return c.task.splits.washout; });
    idx("task", "train", [](auto& c) -> auto& { return c.task.splits.train; });
    idx("task", "validate", [](auto& c) -> auto& { return c.task.splits.validate; });
    idx("task", "test", [](auto& c) -> auto& { return c.task.splits.test; });
    boolean("task", "squash", [](auto& c) -> auto& { return c.task.squash; });
    f.push_back({"task", "mode", [](const ExperimentConfig& c) { return to_string(c.task.protocol.mode); },
                 [](ExperimentConfig& c, const std::string& v) { c.task.protocol.mode = parse_prediction_mode(trim(v)); }});
    idx("task", "teacher_forced", [](auto& c) -> auto& { return c.task.protocol.teacher_forced; });
    idx("task", "horizon", [](auto& c) -> auto& { return c.task.protocol.horizon; });
    idx("task", "at_step", [](auto& c) -> auto& { return c.task.protocol.at_step; });
    f.push_back({"task", "variance_region",
                 [](const ExperimentConfig& c) {
                   return std::string(c.task.protocol.variance_after_train ? "after_train" : "test");
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   const std::string t = trim(v);
                   if (t == "after_train") c.task.protocol.variance_after_train = true;
                   else if (t == "test") c.task.protocol.variance_after_train = false;
                   else throw ConfigError("unknown variance region '" + t + "'");
                 }});

    dbl("mackey_glass", "alpha", [](auto& c) -> auto& { return c.task.mackey_glass.alpha; });
    dbl("mackey_glass", "beta", [](auto& c) -> auto& { return c.task.mackey_glass.beta; });
    dbl("mackey_glass", "gamma", [](auto& c) -> auto& { return c.task.mackey_glass.gamma; });
    dbl("mackey_glass", "tau", [](auto& c) -> auto& { return c.task.mackey_glass.tau; });
    dbl("mackey_glass", "integration_step", [](auto& c) -> auto& { return c.task.mackey_glass.integration_step; });
    idx("mackey_glass", "subsample", [](auto& c) -> auto& { return c.task.mackey_glass.subsample; });
    f.push_back({"mackey_glass", "integrator",
                 [](const ExperimentConfig& c) {
                   return std::string(c.task.mackey_glass.integrator == DdeIntegrator::euler ? "euler" : "rk4");
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   const std::string t = trim(v);
                   if (t == "euler") c.task.mackey_glass.integrator = DdeIntegrator::euler;
                   else if (t == "rk4") c.task.mackey_glass.integrator = DdeIntegrator::rk4;
                   else throw ConfigError("unknown integrator '" + t + "'");
                 }});
    f.push_back({"mackey_glass", "transient",
                 [](const ExperimentConfig& c) {
                   return c.task.mackey_glass.transient ? format_double(*c.task.mackey_glass.transient) : std::string("auto");
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   if (trim(v) == "auto") c.task.mackey_glass.transient.reset();
                   else c.task.mackey_glass.transient = to_double(v);
                 }});

    dbl("lorenz", "sigma", [](auto& c) -> auto& { return c.task.lorenz.sigma; });
    dbl("lorenz", "r", [](auto& c) -> auto& { return c.task.lorenz.r; });
    dbl("lorenz", "b", [](auto& c) -> auto& { return c.task.lorenz.b; });
    dbl("lorenz", "step", [](auto& c) -> auto& { return c.task.lorenz.step; });
    dbl("lorenz", "x0", [](auto& c) -> auto& { return c.task.lorenz.initial_state[0]; });
    dbl("lorenz", "y0", [](auto& c) -> auto& { return c.task.lorenz.initial_state[1]; });
    dbl("lorenz", "z0", [](auto& c) -> auto& { return c.task.lorenz.initial_state[2]; });
    idx("lorenz", "transient_steps", [](auto& c) -> auto& { return c.task.lorenz.transient_steps; });
    dbl("lorenz", "scale", [](auto& c) -> auto& { return c.task.lorenz.scale; });

    idx("esn", "units", [](auto& c) -> auto& { return c.esn.units; });
    f.push_back(grid_field("density"));
    f.push_back({"esn", "spectral_radius",
                 [](const ExperimentConfig& c) {
                   auto it = c.grids.find("spectral_radius");
                   if (it != c.grids.end()) return join(it->second);
                   return c.esn.spectral_radius ? format_double(*c.esn.spectral_radius) : std::string("none");
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   if (trim(v) == "none") {
                     c.esn.spectral_radius.reset();
                     c.grids.erase("spectral_radius");
                     return;
                   }
                   auto values = parse_value_list(v);
                   c.esn.spectral_radius = values.front();
                   c.grids["spectral_radius"] = std::move(values);
                 }});
    dbl("esn", "reservoir_range", [](auto& c) -> auto& { return c.esn.reservoir_range; });
    f.push_back(grid_field("input_scaling"));
    boolean("esn", "autoregressive", [](auto& c) -> auto& { return c.esn.autoregressive; });
    boolean("esn", "feedback", [](auto& c) -> auto& { return c.esn.feedback; });
    dbl("esn", "feedback_scaling", [](auto& c) -> auto& { return c.esn.feedback_scaling; });
    f.push_back(grid_field("leak_rate"));
    dbl("esn", "noise", [](auto& c) -> auto& { return c.esn.noise_scale; });
    dbl("esn", "input_bias", [](auto& c) -> auto& { return c.esn.input_bias; });
    f.push_back({"esn", "activation", [](const ExperimentConfig& c) { return to_string(c.esn.activation); },
                 [](ExperimentConfig& c, const std::string& v) { c.esn.activation = parse_activation(trim(v)); }});
    f.push_back({"esn", "readout", [](const ExperimentConfig& c) { return to_string(c.esn.readout); },
                 [](ExperimentConfig& c, const std::string& v) { c.esn.readout = parse_activation(trim(v)); }});
    f.push_back(grid_field("ridge_lambda"));
    boolean("esn", "noise_in_free_run", [](auto& c) -> auto& { return c.run.noise_in_free_run; });

    idx("ga", "population", [](auto& c) -> auto& { return c.ga.population_size; });
    idx("ga", "generations", [](auto& c) -> auto& { return c.ga.generations; });
    idx("ga", "tournament", [](auto& c) -> auto& { return c.ga.tournament_size; });
    dbl("ga", "crossover_prob", [](auto& c) -> auto& { return c.ga.crossover_prob; });
    dbl("ga", "mutation_prob", [](auto& c) -> auto& { return c.ga.mutation_prob; });
    f.push_back({"ga", "mutation_sigma",
                 [](const ExperimentConfig& c) {
                   return c.ga.mutation_sigma ? format_double(*c.ga.mutation_sigma) : std::string("auto");
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   if (trim(v) == "auto") c.ga.mutation_sigma.reset();
                   else c.ga.mutation_sigma = to_double(v);
                 }});
    dbl("ga", "mutation_sigma_factor", [](auto& c) -> auto& { return c.ga.mutation_sigma_factor; });
    idx("ga", "stall_generations", [](auto& c) -> auto& { return c.ga.stall_generations; });
    dbl("ga", "stall_tolerance", [](auto& c) -> auto& { return c.ga.stall_tolerance; });
    boolean("ga", "reinject_elite", [](auto& c) -> auto& { return c.ga.reinject_elite; });
    idx("ga", "checkpoint_every", [](auto& c) -> auto& { return c.run.checkpoint_every; });

    idx("evolution", "coefficients", [](auto& c) -> auto& { return c.evolution.coefficients; });
    boolean("evolution", "rescale", [](auto& c) -> auto& { return c.evolution.rescale; });
    idx("evolution", "fitness_tasks", [](auto& c) -> auto& { return c.evolution.fitness.tasks; });
    idx("evolution", "fitness_horizon", [](auto& c) -> auto& { return c.evolution.fitness.horizon; });
    f.push_back({"evolution", "fitness_metric", [](const ExperimentConfig& c) { return to_string(c.evolution.fitness.metric); },
                 [](ExperimentConfig& c, const std::string& v) { c.evolution.fitness.metric = parse_fitness_metric(trim(v)); }});
    dbl("evolution", "divergence_penalty", [](auto& c) -> auto& { return c.evolution.divergence_penalty; });

    f.push_back({"metrics", "variance",
                 [](const ExperimentConfig& c) {
                   return std::string(c.run.variance == VarianceConvention::population ? "population" : "sample");
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   const std::string t = trim(v);
                   if (t == "population") c.run.variance = VarianceConvention::population;
                   else if (t == "sample") c.run.variance = VarianceConvention::sample;
                   else throw ConfigError("unknown variance convention '" + t + "'");
                 }});

    u64("run", "seed", [](auto& c) -> auto& { return c.run.seed; });
    idx("run", "repeats", [](auto& c) -> auto& { return c.run.repeats; });
    text("run", "output", [](auto& c) -> auto& { return c.run.output; });
    return f;
  }();
  return table;
}

}  // namespace

std::string format_double(double v) {
  // shortest representation that round-trips
  char buf[40];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw ConfigError("cannot format number");
  return std::string(buf, end);
}

std::vector<double> parse_value_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty value list");
  std::vector<double> values;
  if (t.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ConfigError("range must be start:step:stop, got '" + t + "'");
    const double start = to_double(parts[0]);
    const double step = to_double(parts[1]);
    const double stop = to_double(parts[2]);
    if (!(step > 0.0) || stop < start) throw ConfigError("invalid range '" + t + "'");
    const auto count = static_cast<Index>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (Index i = 0; i < count; ++i) {
      const double v = start + static_cast<double>(i) * step;
      values.push_back(std::round(v * 1e12) / 1e12);
    }
  } else {
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, ',')) values.push_back(to_double(part));
  }
  if (values.empty()) throw ConfigError("empty value list");
  return values;
}

// --- IniDocument -----------------------------------------------------------

IniDocument IniDocument::parse(const std::string& text, const std::string& source) {
  IniDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source + ":" + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    if (section.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": key outside a section");
    doc.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return doc;
}

void IniDocument::set(const std::string& section, const std::string& key, const std::string& value) {
  auto sec = std::find_if(sections_.begin(), sections_.end(), [&](const auto& s) { return s.first == section; });
  if (sec == sections_.end()) {
    sections_.push_back({section, {}});
    sec = std::prev(sections_.end());
  }
  auto kv = std::find_if(sec->second.begin(), sec->second.end(), [&](const auto& p) { return p.first == key; });
  if (kv == sec->second.end()) sec->second.emplace_back(key, value);
  else kv->second = value;
}

std::optional<std::string> IniDocument::get(const std::string& section, const std::string& key) const {
  for (const auto& [name, entries] : sections_) {
    if (name != section) continue;
    for (const auto& [k, v] : entries)
      if (k == key) return v;
  }
  return std::nullopt;
}

std::string IniDocument::serialize() const {
  std::string out;
  for (const auto& [name, entries] : sections_) {
    if (!out.empty()) out += '\n';
    out += "[" + name + "]\n";
    for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  }
  return out;
}

// --- ExperimentConfig ------------------------------------------------------

Index ExperimentConfig::grid_size() const {
  Index n = 1;
  for (const auto& [key, values] : grids) n *= static_cast<Index>(values.size());
  return n;
}

std::vector<std::pair<std::string, double>> ExperimentConfig::grid_coordinates(Index index) const {
  if (index < 0 || index >= grid_size()) throw ConfigError("grid cell index out of range");
  std::vector<std::pair<std::string, double>> coords;
  // last key varies fastest
  std::vector<std::pair<std::string, const std::vector<double>*>> present;
  for (const auto& key : grid_keys()) {
    auto it = grids.find(key);
    if (it != grids.end()) present.emplace_back(key, &it->second);
  }
  Index rest = index;
  std::vector<std::pair<std::string, double>> reversed;
  for (auto it = present.rbegin(); it != present.rend(); ++it) {
    const auto n = static_cast<Index>(it->second->size());
    reversed.emplace_back(it->first, (*it->second)[static_cast<std::size_t>(rest % n)]);
    rest /= n;
  }
  coords.assign(reversed.rbegin(), reversed.rend());
  return coords;
}

ExperimentConfig ExperimentConfig::grid_point(Index index) const {
  ExperimentConfig point = *this;
  for (const auto& [key, value] : grid_coordinates(index)) {
    if (key == "spectral_radius") point.esn.spectral_radius = value;
    else grid_scalar(point, key) = value;
    point.grids[key] = {value};
  }
  return point;
}

void ExperimentConfig::validate() const {
  const auto& n = task.name;
  if (n != "mgs" && n != "lorenz" && n != "sunspot" && n != "file") {
    throw ConfigError("unknown task '" + n + "' (expected mgs, lorenz, sunspot or file)");
  }
  if ((n == "file") && task.file.empty()) throw ConfigError("task 'file' needs task.file");
  for (const auto& [key, values] : grids) {
    if (values.empty()) throw ConfigError("grid '" + key + "' is empty");
  }
  esn.validate();
  ga.validate();
  if (ridge_lambda < 0.0) throw ConfigError("ridge_lambda must be nonnegative");
  if (run.repeats < 1) throw ConfigError("run.repeats must be positive");
  if (run.checkpoint_every < 1) throw ConfigError("ga.checkpoint_every must be positive");
  if (evolution.coefficients < 1) throw ConfigError("evolution.coefficients must be positive");
}

IniDocument ExperimentConfig::to_ini() const {
  IniDocument doc;
  for (const auto& f : fields()) doc.set(f.section, f.key, f.get(*this));
  return doc;
}

ExperimentConfig ExperimentConfig::from_ini(const IniDocument& doc) {
  ExperimentConfig c;
  const auto& table = fields();
  for (const auto& [section, entries] : doc.sections()) {
    for (const auto& [key, value] : entries) {
      auto f = std::find_if(table.begin(), table.end(),
                            [&](const Field& fl) { return section == fl.section && key == fl.key; });
      if (f == table.end()) throw ConfigError("unknown config key [" + section + "] " + key);
      try {
        f->set(c, value);
      } catch (const ConfigError& e) {
        throw ConfigError("[" + section + "] " + key + ": " + e.what());
      }
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& source) {
  return from_ini(IniDocument::parse(text, source));
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config " + path.string());
  out << serialize();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("EVOESN_DATA_DIR")) return env;
  return EVOESN_DATA_DIR_DEFAULT;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.task.name = name;
  if (name == "mgs") {
    c.task.splits = {1000, 3000, 2000, 84};
    c.task.protocol = {PredictionMode::free_run, 0, 84, 84, true};
    c.esn.units = 1000;
    c.esn.density = 0.2;
    c.esn.spectral_radius = 0.8;
    c.esn.input_scaling = 1.0;
    c.esn.autoregressive = true;
    c.esn.feedback = false;
    c.esn.feedback_scaling = 1.0;
    c.esn.noise_scale = 1e-10;
    c.esn.input_bias = 0.2;
    c.esn.readout = Activation::identity;
    c.ridge_lambda = 1e-9;
    c.ga.generations = 70;
    c.evolution.coefficients = 500;
    c.evolution.fitness = {12, 300, FitnessMetric::nrmse_horizon};
  } else if (name == "lorenz") {
    c.task.splits = {1000, 6000, 1000, 600};
    c.task.protocol = {PredictionMode::free_run, 0, 600, 84, true};
    c.esn.units = 600;
    c.esn.density = 0.2;
    c.esn.spectral_radius = 0.97;
    c.esn.input_scaling = 1.0;
    c.esn.autoregressive = false;
    c.esn.feedback = true;
    c.esn.feedback_scaling = 4.0;
    c.esn.noise_scale = 1e-7;
    c.esn.input_bias = 0.2;
    c.esn.readout = Activation::identity;
    c.ridge_lambda = 1e-6;
    c.ga.generations = 70;
    c.evolution.coefficients = 150;
    c.evolution.fitness = {12, 200, FitnessMetric::nrmse_horizon};
  } else if (name == "sunspot") {
    c.task.file = "sunspot_month_v1.csv";
    c.task.protocol = {PredictionMode::one_step, 0, 0, 84};
    c.esn.units = 200;
    c.esn.density = 0.2;
    c.esn.spectral_radius = 0.8;
    c.esn.input_scaling = 0.1;
    c.esn.autoregressive = true;
    c.esn.feedback = false;
    c.esn.noise_scale = 0.0;
    c.esn.input_bias = 1.0;
    c.esn.leak_rate = 0.7;
    c.esn.readout = Activation::identity;
    c.ridge_lambda = 1e-5;
    c.ga.generations = 150;
    c.evolution.coefficients = 50;
    c.evolution.fitness = {1, 500, FitnessMetric::nmse_one_step};
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected mgs, lorenz or sunspot)");
  }
  return c;
}

ExperimentConfig apply_overrides(const ExperimentConfig& config, const std::vector<std::string>& overrides) {
  IniDocument doc = config.to_ini();
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError("override must look like section.key=value, got '" + o + "'");
    }
    doc.set(trim(o.substr(0, dot)), trim(o.substr(dot + 1, eq - dot - 1)), trim(o.substr(eq + 1)));
  }
  return ExperimentConfig::from_ini(doc);
}

}  // namespace evoesn
