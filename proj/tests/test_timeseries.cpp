#include "evoesn/timeseries.hpp"

#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace evoesn;

namespace {

// Mackey-Glass by classical RK4 on a fine grid with its own delay array
// (no ring buffer); delayed midpoints are averaged neighbours.
std::vector<double> mgs_reference(double h, double tau, double history, double transient, Index samples) {
  const auto delay = static_cast<Index>(std::llround(tau / h));
  const auto per_unit = static_cast<Index>(std::llround(1.0 / h));
  const auto discard = static_cast<Index>(std::llround(transient / h));
  const Index steps = discard + (samples - 1) * per_unit;
  std::vector<double> y(static_cast<std::size_t>(delay + steps + 1), history);
  auto f = [](double v, double d) { return 0.2 * d / (1.0 + std::pow(d, 10.0)) - 0.1 * v; };
  for (Index k = 0; k < steps; ++k) {
    const Index i = delay + k;
    const double d0 = y[i - delay], d1 = y[i + 1 - delay], dm = 0.5 * (d0 + d1);
    const double v = y[i];
    const double k1 = f(v, d0), k2 = f(v + 0.5 * h * k1, dm), k3 = f(v + 0.5 * h * k2, dm), k4 = f(v + h * k3, d1);
    y[i + 1] = v + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  std::vector<double> out;
  for (Index s = 0; s < samples; ++s) out.push_back(y[delay + discard + s * per_unit]);
  return out;
}

using State = std::array<double, 3>;

State lorenz_rhs(const State& s) { return {10.0 * (s[1] - s[0]), 28.0 * s[0] - s[1] - s[0] * s[2], s[0] * s[1] - 8.0 / 3.0 * s[2]}; }

// Dormand-Prince 5(4) with step-size control, landing exactly on `t_end`.
State dopri_advance(State y, double t_end, double& h) {
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
  static const double a[7][6] = {{},
                                 {1.0 / 5},
                                 {3.0 / 40, 9.0 / 40},
                                 {44.0 / 45, -56.0 / 15, 32.0 / 9},
                                 {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
                                 {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
                                 {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double b5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  static const double b4[7] = {5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640, -92097.0 / 339200, 187.0 / 2100,
                               1.0 / 40};
  (void)c;
  double t = 0.0;
  while (t < t_end) {
    const double step = std::min(h, t_end - t);
    State k[7];
    for (int i = 0; i < 7; ++i) {
      State yi = y;
      for (int j = 0; j < i; ++j)
        for (int d = 0; d < 3; ++d) yi[d] += step * a[i][j] * k[j][d];
      k[i] = lorenz_rhs(yi);
    }
    State y5 = y, y4 = y;
    for (int i = 0; i < 7; ++i)
      for (int d = 0; d < 3; ++d) {
        y5[d] += step * b5[i] * k[i][d];
        y4[d] += step * b4[i] * k[i][d];
      }
    double err = 0.0;
    for (int d = 0; d < 3; ++d) err = std::max(err, std::abs(y5[d] - y4[d]) / (1e-13 + 1e-13 * std::abs(y5[d])));
    if (err <= 1.0) {
      t += step;
      y = y5;
    }
    h = step * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-30), -0.2)));
  }
  return y;
}

std::string sunspot_text(Index rows, double value = 50.0) {
  std::ostringstream out;
  for (Index i = 0; i < rows; ++i) {
    const int year = 1749 + static_cast<int>(i / 12), month = static_cast<int>(i % 12) + 1;
    char line[96];
    std::snprintf(line, sizeof line, "%d;%02d;%8.3f;%6.1f;  -1.0;   -1;1\n", year, month, year + (month - 0.5) / 12,
                  value + 40.0 * std::sin(0.05 * static_cast<double>(i)));
    out << line;
  }
  return out.str();
}

}  // namespace

TEST_SUITE("timeseries") {

TEST_CASE("Mackey-Glass length, range and determinism") {
  MgsParams p;
  const auto a = generate_mackey_glass(p, 6084, 42);
  CHECK(a.length() == 6084);
  CHECK(a.dt == 1.0);
  CHECK(a.values.allFinite());
  CHECK(a.values.minCoeff() > 0.2);
  CHECK(a.values.maxCoeff() < 1.5);
  CHECK(a.values == generate_mackey_glass(p, 6084, 42).values);
  CHECK(a.values != generate_mackey_glass(p, 6084, 43).values);
}

TEST_CASE("Mackey-Glass long-run mean agrees with a fine-step reference") {
  MgsParams p;
  p.constant_history = 1.2;
  const Index n = 5000;
  const auto series = generate_mackey_glass(p, n, 1);
  const auto ref = mgs_reference(0.01, 17.0, 1.2, 170.0, n);
  double mean_ref = 0.0;
  for (double v : ref) mean_ref += v;
  mean_ref /= static_cast<double>(n);
  CHECK(std::abs(series.values.mean() - mean_ref) < 0.02 * mean_ref);
}

TEST_CASE("Mackey-Glass step refinement changes early samples by under 1% RMS") {
  MgsParams coarse;
  MgsParams fine;
  fine.integration_step = 0.05;
  fine.subsample = 20;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto a = generate_mackey_glass(coarse, 200, seed);
    const auto b = generate_mackey_glass(fine, 200, seed);
    const double rms_diff = std::sqrt((a.values - b.values).squaredNorm() / 200.0);
    const double rms = std::sqrt(a.values.squaredNorm() / 200.0);
    CHECK(rms_diff < 0.01 * rms);
  }
}

TEST_CASE("Mackey-Glass with zero derivative stays constant") {
  MgsParams p;
  p.alpha = 0.0;
  p.gamma = 0.0;
  p.constant_history = 0.7;
  const auto s = generate_mackey_glass(p, 100, 3);
  CHECK((s.values.array() == 0.7).all());
}

TEST_CASE("Mackey-Glass parameter checks") {
  MgsParams p;
  p.tau = 17.05;
  CHECK_THROWS_AS(generate_mackey_glass(p, 10, 1), ConfigError);
  MgsParams q;
  q.subsample = 5;
  CHECK_THROWS_AS(generate_mackey_glass(q, 10, 1), ConfigError);
  CHECK_THROWS_AS(generate_mackey_glass(MgsParams{}, 0, 1), ConfigError);
}

TEST_CASE("Lorenz matches an adaptive reference integrator over 5 time units") {
  LorenzParams p;
  p.transient_steps = 0;
  const auto series = generate_lorenz(p, 501);
  const Matrix<double> raw = series.raw();
  State y{1.0, 1.0, 1.0};
  double h = 1e-3;
  double worst = std::abs(raw(0, 0) - y[0]);
  for (Index t = 1; t <= 500; ++t) {
    y = dopri_advance(y, 0.01, h);
    worst = std::max(worst, std::abs(raw(t, 0) - y[0]));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("Lorenz scaling, fixed point and determinism") {
  LorenzParams p;
  const auto a = generate_lorenz(p, 8600);
  CHECK(a.length() == 8600);
  CHECK(a.transform.scale == 0.01);
  CHECK(a.values.cwiseAbs().maxCoeff() < 0.3);
  CHECK(a.raw().cwiseAbs().maxCoeff() > 10.0);
  CHECK(a.values == generate_lorenz(p, 8600).values);
  LorenzParams origin;
  origin.initial_state = {0.0, 0.0, 0.0};
  CHECK(generate_lorenz(origin, 100).values.isZero(0));
}

TEST_CASE("transform round trip") {
  const Transform affine{2.5, -0.75, false};
  const Transform squash = affine.then(Transform{1.0, 0.0, true});
  for (double x : {-0.2, 0.0, 0.13, 0.4}) {
    CHECK(std::abs(affine.inverse(affine.forward(x)) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
    CHECK(std::abs(squash.inverse(squash.forward(x)) - x) <= 1e-12 * std::max(1.0, std::abs(x)));
  }
  CHECK_THROWS_AS(squash.then(affine), ConfigError);
}

TEST_CASE("split validation") {
  auto s = generate_lorenz(LorenzParams{}, 100);
  CHECK_NOTHROW(with_splits(s, Splits{10, 50, 20, 20}));
  CHECK_THROWS_AS(with_splits(s, Splits{10, 50, 20, 21}), ConfigError);
  CHECK_THROWS_AS(with_splits(s, Splits{-1, 50, 20, 20}), ConfigError);
}

TEST_CASE("sunspot parsing, splits and normalization") {
  const auto s = parse_sunspots(sunspot_text(3276));
  CHECK(s.length() == 3276);
  CHECK(s.splits == Splits{100, 1600, 500, 1076});
  const auto train = s.values.middleRows(100, 1600);
  CHECK(train.minCoeff() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(train.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
  const Matrix<double> raw = s.raw();
  CHECK(std::abs(raw(0, 0) - 50.0) < 1e-12);
  CHECK(std::abs(raw(700, 0) - std::round((50.0 + 40.0 * std::sin(35.0)) * 10.0) / 10.0) < 1e-9);
}

TEST_CASE("sunspot value column is read as written") {
  std::string text = sunspot_text(2300);
  text.replace(0, text.find('\n'), "1749;01;1749.042;96.7;-1.0;-1;1");
  const auto s = parse_sunspots(text);
  CHECK(s.raw()(0, 0) == doctest::Approx(96.7).epsilon(1e-14));
}

TEST_CASE("sunspot errors") {
  CHECK_THROWS_AS(parse_sunspots("1749;01;1749.042;96.7;-1.0;-1;1\n"), ConfigError);
  std::string bad = sunspot_text(2300);
  bad.insert(bad.find('\n', 100) + 1, "1750;xx;1750.0;1.0\n");
  try {
    parse_sunspots(bad, "fixture");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("fixture:") != std::string::npos);
  }
  std::string missing = sunspot_text(2300);
  const auto second = missing.find('\n') + 1;
  missing.replace(second, missing.find('\n', second) - second, "1749;02;1749.125;  -1.0;  -1.0;   -1;1");
  try {
    parse_sunspots(missing);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("1749-02") != std::string::npos);
  }
}

TEST_CASE("bundled sunspot file loads") {
  const auto s = load_sunspots(std::filesystem::path(EVOESN_TEST_DATA_DIR) / "sunspot_month_v1.csv");
  CHECK(s.length() == 3177);
  CHECK(s.splits.test == 977);
}

TEST_CASE("CSV export round trip") {
  const auto path = std::filesystem::temp_directory_path() / "evoesn_series_test.csv";
  auto s = generate_lorenz(LorenzParams{}, 50);
  write_series_csv(path, s);
  const auto back = read_series_csv(path);
  CHECK(back.length() == 50);
  CHECK((back.values - s.raw()).cwiseAbs().maxCoeff() < 1e-15);
  std::filesystem::remove(path);
}

}
