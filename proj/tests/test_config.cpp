#include "evoesn/config.hpp"

#include <doctest.h>

#include <filesystem>

using namespace evoesn;

TEST_SUITE("config") {

TEST_CASE("value lists") {
  CHECK(parse_value_list("0.5") == std::vector<double>{0.5});
  CHECK(parse_value_list("1e-3, 1e-4,1e-5") == std::vector<double>{1e-3, 1e-4, 1e-5});
  const auto rho = parse_value_list("0.1:0.1:1.4");
  REQUIRE(rho.size() == 14);
  CHECK(rho.front() == 0.1);
  CHECK(rho[2] == 0.3);
  CHECK(rho.back() == 1.4);
  const auto leak = parse_value_list("0.01:0.05:0.5");
  CHECK(leak.size() == 10);
  CHECK(leak.back() == 0.46);
  CHECK_THROWS_AS(parse_value_list(""), ConfigError);
  CHECK_THROWS_AS(parse_value_list("1:0:2"), ConfigError);
  CHECK_THROWS_AS(parse_value_list("a,b"), ConfigError);
}

TEST_CASE("presets round trip through the file format") {
  for (const char* name : {"mgs", "lorenz", "sunspot"}) {
    const auto config = preset(name);
    CHECK_NOTHROW(config.validate());
    const auto text = config.serialize();
    const auto back = ExperimentConfig::parse(text);
    CHECK(back.serialize() == text);
    CHECK(back.hash() == config.hash());
    CHECK(ExperimentConfig::parse(back.serialize()).hash() == config.hash());
  }
}

TEST_CASE("preset values") {
  const auto mgs = preset("mgs");
  CHECK(mgs.esn.units == 1000);
  CHECK(*mgs.esn.spectral_radius == 0.8);
  CHECK(mgs.esn.noise_scale == 1e-10);
  CHECK(mgs.esn.input_bias == 0.2);
  CHECK(mgs.ridge_lambda == 1e-9);
  CHECK(mgs.evolution.coefficients == 500);
  CHECK(mgs.task.splits.total() == 6084);
  const auto lorenz = preset("lorenz");
  CHECK(lorenz.esn.units == 600);
  CHECK(*lorenz.esn.spectral_radius == 0.97);
  CHECK(lorenz.esn.feedback);
  CHECK(lorenz.esn.feedback_scaling == 4.0);
  CHECK(lorenz.ridge_lambda == 1e-6);
  CHECK(lorenz.task.splits.total() == 8600);
  const auto sun = preset("sunspot");
  CHECK(sun.ridge_lambda == 1e-5);
  CHECK(sun.esn.input_scaling == 0.1);
  CHECK(sun.esn.leak_rate == 0.7);
  CHECK_THROWS_AS(preset("weather"), ConfigError);
}

TEST_CASE("grids") {
  auto config = apply_overrides(preset("mgs"), {"esn.spectral_radius=0.1:0.1:1.4", "esn.density=0.1,0.2,0.3,0.4,0.5"});
  CHECK(config.grid_size() == 70);
  const auto point = config.grid_point(7);
  CHECK(point.grid_size() == 1);
  const auto coords = config.grid_coordinates(7);
  REQUIRE(coords.size() == 5);
  CHECK(coords[0].first == "spectral_radius");
  CHECK(coords[0].second == 0.2);
  CHECK(coords[1].first == "density");
  CHECK(coords[1].second == 0.3);
  CHECK(*point.esn.spectral_radius == 0.2);
  CHECK(point.esn.density == 0.3);
  CHECK_THROWS_AS(config.grid_point(70), ConfigError);
  const auto back = ExperimentConfig::parse(config.serialize());
  CHECK(back.hash() == config.hash());
  CHECK(back.grid_size() == 70);
}

TEST_CASE("overrides and errors") {
  auto c = apply_overrides(preset("mgs"), {"esn.units=50", "run.seed=9", "esn.spectral_radius=none"});
  CHECK(c.esn.units == 50);
  CHECK(c.run.seed == 9);
  CHECK_FALSE(c.esn.spectral_radius);
  CHECK(ExperimentConfig::parse(c.serialize()).hash() == c.hash());
  CHECK(c.hash() != preset("mgs").hash());
  CHECK_THROWS_AS(apply_overrides(c, {"esn.unit=5"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, {"nosection=5"}), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, {"esn.units=five"}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[esn]\nunits 5\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("units = 5\n"), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, {"task.name=weather"}).validate(), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, {"esn.leak_rate=0"}).validate(), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, {"ga.population=1"}).validate(), ConfigError);
}

TEST_CASE("comments and partial files fall back to defaults") {
  const auto c = ExperimentConfig::parse("# test\n[task]\nname = lorenz  # trailing\n\n[esn]\nunits = 7\n");
  CHECK(c.task.name == "lorenz");
  CHECK(c.esn.units == 7);
  CHECK(c.ga.population_size == 20);
}

TEST_CASE("save and load") {
  const auto path = std::filesystem::temp_directory_path() / "evoesn_config_test.ini";
  const auto c = preset("lorenz");
  c.save(path);
  CHECK(ExperimentConfig::load(path).hash() == c.hash());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ExperimentConfig::load(path), ConfigError);
}

}
