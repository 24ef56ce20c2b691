#pragma once

// Experiment configuration and its file representation.
//
// The file format is a flat key-value text with one section per module:
//
//   # comment
//   [esn]
//   units = 1000
//   spectral_radius = 0.1:0.1:1.4    # grid: start:step:stop, inclusive
//   ridge_lambda = 1e-3, 1e-4, 1e-5  # grid: explicit list
//
// Unknown sections or keys are rejected. Serialization is canonical (fixed
// key order, 17 significant digits), so parse -> serialize -> parse is
// lossless and the config hash is stable.

#include "evoesn/esn.hpp"
#include "evoesn/evolution.hpp"
#include "evoesn/ga.hpp"
#include "evoesn/protocol.hpp"
#include "evoesn/timeseries.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evoesn {

/// Ordered sections of ordered key/value pairs.
class IniDocument {
 public:
  static IniDocument parse(const std::string& text, const std::string& source = "<config>");

  void set(const std::string& section, const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>& sections() const {
    return sections_;
  }
  std::string serialize() const;

 private:
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections_;
};

struct TaskConfig {
  std::string name = "mgs";  // mgs | lorenz | sunspot | file
  std::string file;
  std::uint64_t data_seed = 42;
  /// Generated length; 0 means the split total.
  Index length = 0;
  Splits splits;
  bool squash = false;
  MgsParams mackey_glass;
  LorenzParams lorenz;
  TestProtocol protocol;
};

struct RunConfig {
  std::uint64_t seed = 1;
  Index repeats = 1;
  std::string output = "out";
  Index checkpoint_every = 10;
  bool noise_in_free_run = false;
  VarianceConvention variance = VarianceConvention::population;
};

/// Parameters that accept grids.
inline const std::vector<std::string>& grid_keys() {
  static const std::vector<std::string> keys{"spectral_radius", "density", "leak_rate", "ridge_lambda",
                                             "input_scaling"};
  return keys;
}

struct ExperimentConfig {
  TaskConfig task;
  EsnHyperparameters esn;
  double ridge_lambda = 1e-9;
  /// Value lists for the gridded [esn] keys; a single entry is a plain value.
  std::map<std::string, std::vector<double>> grids;
  GaConfig ga;
  EvoSettings evolution;
  RunConfig run;

  /// Cartesian product size of all grids.
  Index grid_size() const;
  /// Config with every grid collapsed to its value at cell `index`
  /// (row-major over grid_keys() order).
  ExperimentConfig grid_point(Index index) const;
  /// Values of the gridded keys at cell `index`.
  std::vector<std::pair<std::string, double>> grid_coordinates(Index index) const;

  void validate() const;

  IniDocument to_ini() const;
  std::string serialize() const { return to_ini().serialize(); }
  static ExperimentConfig from_ini(const IniDocument& doc);
  static ExperimentConfig parse(const std::string& text, const std::string& source = "<config>");
  static ExperimentConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// 16 hex digits of FNV-1a over the canonical serialization.
  std::string hash() const;
};

/// Built-in benchmark presets: "mgs", "lorenz", "sunspot".
ExperimentConfig preset(const std::string& name);

/// Applies "section.key=value" overrides on top of `config`.
ExperimentConfig apply_overrides(const ExperimentConfig& config, const std::vector<std::string>& overrides);

/// Directory searched for bundled data files (EVOESN_DATA_DIR overrides).
std::filesystem::path data_directory();

/// "a:step:b" (inclusive) or "a, b, c" or a single number.
std::vector<double> parse_value_list(const std::string& text);

std::string format_double(double v);

}  // namespace evoesn
