#pragma once

#include "evoesn/common.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace evoesn {

struct Splits {
  Index washout = 0;
  Index train = 0;
  Index validate = 0;
  Index test = 0;

  Index total() const { return washout + train + validate + test; }
  Index train_begin() const { return washout; }
  Index validate_begin() const { return washout + train; }
  Index test_begin() const { return washout + train + validate; }

  friend bool operator==(const Splits&, const Splits&) = default;
};

/// Invertible value transform: forward(x) = squash ? tanh(scale*x + shift)
/// : scale*x + shift.
struct Transform {
  double scale = 1.0;
  double shift = 0.0;
  bool squash = false;

  double forward(double x) const {
    const double y = scale * x + shift;
    return squash ? std::tanh(y) : y;
  }
  double inverse(double y) const {
    const double z = squash ? std::atanh(y) : y;
    return (z - shift) / scale;
  }
  bool identity() const { return scale == 1.0 && shift == 0.0 && !squash; }

  /// Applies `next` after this transform. Only affine-then-affine or
  /// affine-then-squash compositions are representable.
  Transform then(const Transform& next) const;

  friend bool operator==(const Transform&, const Transform&) = default;
};

/// Scalar or low-dimensional sequence in model space (after `transform`).
struct TimeSeries {
  std::string name;
  Matrix<double> values;  // T x dim
  double dt = 1.0;
  Splits splits;
  Transform transform;

  Index length() const { return values.rows(); }
  Index dimension() const { return values.cols(); }

  /// Values mapped back to original units.
  Matrix<double> raw() const;
  Matrix<double> raw(Index begin, Index count) const;

  /// Checks the split bound and finiteness; throws ConfigError/NumericError.
  void validate() const;
};

/// Returns `series` with new split annotations (validated).
TimeSeries with_splits(TimeSeries series, const Splits& splits);

/// Applies `extra` on top of the current transform (values and descriptor).
TimeSeries apply_transform(TimeSeries series, const Transform& extra);

enum class DdeIntegrator { euler, rk4 };

struct MgsParams {
  double alpha = 0.2;
  double beta = 10.0;
  double gamma = 0.1;
  double tau = 17.0;
  double integration_step = 0.1;
  Index subsample = 10;
  DdeIntegrator integrator = DdeIntegrator::rk4;
  /// Discarded transient in model time units; unset means 10 * tau.
  std::optional<double> transient;
  /// Constant history instead of the seeded random one.
  std::optional<double> constant_history;
  double history_low = 0.0;
  double history_high = 1.3;

  void validate() const;
};

/// Mackey-Glass series sampled at unit time intervals, first sample taken
/// after the transient. The history on [-tau, 0] is piecewise linear
/// through seeded uniform knots at integer times.
TimeSeries generate_mackey_glass(const MgsParams& params, Index total_len, std::uint64_t seed);

struct LorenzParams {
  double sigma = 10.0;
  double r = 28.0;
  double b = 8.0 / 3.0;
  double step = 0.01;
  std::array<double, 3> initial_state{1.0, 1.0, 1.0};
  Index transient_steps = 1000;
  double scale = 0.01;

  void validate() const;
};

/// x-coordinate of the Lorenz system (fixed-step RK4), one sample per step,
/// stored multiplied by `scale` with the scaling recorded in the transform.
TimeSeries generate_lorenz(const LorenzParams& params, Index total_len);

/// Default sunspot splits: 100 washout, 1600 train, 500 validation, rest test.
Splits sunspot_splits(Index length);

/// SIDC monthly mean total sunspot number file (semicolon-delimited:
/// year; month; decimal year; value; std; #obs; marker). Min-max normalized
/// on the training segment.
TimeSeries load_sunspots(const std::filesystem::path& path);
TimeSeries parse_sunspots(const std::string& text, const std::string& source = "<memory>");

/// Two-column delimited text "index,value" (one value column per dimension).
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series, bool original_units = true);
TimeSeries read_series_csv(const std::filesystem::path& path);

}  // namespace evoesn
