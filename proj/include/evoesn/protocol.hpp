#pragma once

// Training and held-out evaluation of an ESN on a split-annotated series.

#include "evoesn/esn.hpp"
#include "evoesn/metrics.hpp"
#include "evoesn/timeseries.hpp"

#include <string>

namespace evoesn {

enum class PredictionMode { free_run, one_step };

std::string to_string(PredictionMode mode);
PredictionMode parse_prediction_mode(const std::string& name);

/// Test protocol on the test split: `teacher_forced` rows of warm-up then
/// `horizon` autonomous steps (free_run), or one-step-ahead prediction of
/// every test row (one_step).
struct TestProtocol {
  PredictionMode mode = PredictionMode::free_run;
  Index teacher_forced = 0;
  Index horizon = 0;
  /// Step for the single-residual NRMSE (free_run only).
  Index at_step = 84;
  /// Rows whose variance normalizes the metrics: the test split only, or
  /// everything after training (validation + test).
  bool variance_after_train = false;
};

struct TrainedEsn {
  EsnModel<double> model;
  ReservoirState<double> state;  // after the training segment
};

/// Teacher-forced state collection over washout + train (noise, if
/// enabled, from the model seed's noise stream) and ridge readout fit.
TrainedEsn train_on_series(EsnModel<double> model, const TimeSeries& series, double ridge_lambda);

/// Post-training state of an already trained model, recomputed by replaying
/// the washout and training rows with the same noise stream.
TrainedEsn restore_trained(EsnModel<double> model, const TimeSeries& series);

/// Runs the test protocol from the post-training state (the validation
/// split is teacher-forced first). Metrics are computed in original units.
EvalReport evaluate_test(const TrainedEsn& trained, const TimeSeries& series, const TestProtocol& protocol,
                         VarianceConvention convention = VarianceConvention::population,
                         bool noise_in_free_run = false);

}  // namespace evoesn
