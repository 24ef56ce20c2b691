#pragma once

// Evolution of reservoir weights in the DCT domain. A chromosome is decoded
// onto the fixed layout, the reservoir is optionally rescaled to the target
// spectral radius, the readout is trained on the training split and the
// individual is scored on frozen validation windows.

#include "evoesn/codec.hpp"
#include "evoesn/ga.hpp"
#include "evoesn/protocol.hpp"

#include <memory>
#include <string>
#include <vector>

namespace evoesn {

enum class FitnessMetric { nrmse_horizon, nrmse_at_step, nmse_one_step };

std::string to_string(FitnessMetric metric);
FitnessMetric parse_fitness_metric(const std::string& name);

struct FitnessSpec {
  Index tasks = 12;
  Index horizon = 300;
  FitnessMetric metric = FitnessMetric::nrmse_horizon;
};

struct EvoSettings {
  Index coefficients = 500;
  bool rescale = true;
  double ridge_lambda = 1e-9;
  FitnessSpec fitness;
  double divergence_penalty = 1e6;
  VarianceConvention variance = VarianceConvention::population;
};

class EvoProblem {
 public:
  /// `base` supplies the layout, input and feedback weights shared by every
  /// individual; its reservoir is the seed-0 canonical reservoir.
  EvoProblem(EsnModel<double> base, TimeSeries series, EvoSettings settings);

  /// Fitness (lower is better). Numeric failures yield the divergence
  /// penalty with `diverged` set. Thread-safe.
  FitnessResult evaluate(const Vector<double>& genes) const;

  /// Generation-0 chromosome: an independently sampled canonical reservoir
  /// on the shared layout, encoded to C coefficients.
  Vector<double> initial_genes(Index individual) const;

  /// Reservoir of `genes`, rescaled when configured (skipped if rho = 0).
  EsnModel<double> decode_model(const Vector<double>& genes) const;

  TrainedEsn train(const Vector<double>& genes) const;

  FitnessFunction fitness_function() const;

  const std::vector<Index>& window_starts() const { return windows_; }
  const FourierCodec<double>& codec() const { return *codec_; }
  const EsnModel<double>& base() const { return base_; }
  const TimeSeries& series() const { return series_; }
  const EvoSettings& settings() const { return settings_; }

 private:
  double score(const TrainedEsn& trained) const;

  EsnModel<double> base_;
  TimeSeries series_;
  EvoSettings settings_;
  std::shared_ptr<const FourierCodec<double>> codec_;
  std::vector<Index> windows_;
  Vector<double> validation_raw_;
  double validation_variance_ = 0.0;
};

}  // namespace evoesn
