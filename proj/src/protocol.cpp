#include "evoesn/protocol.hpp"

#include <cmath>

namespace evoesn {

std::string to_string(PredictionMode mode) { return mode == PredictionMode::free_run ? "free_run" : "one_step"; }

PredictionMode parse_prediction_mode(const std::string& name) {
  if (name == "free_run") return PredictionMode::free_run;
  if (name == "one_step") return PredictionMode::one_step;
  throw ConfigError("unknown prediction mode '" + name + "' (expected free_run or one_step)");
}

TrainedEsn train_on_series(EsnModel<double> model, const TimeSeries& series, double ridge_lambda) {
  series.validate();
  const auto& s = series.splits;
  if (s.train < 1) throw ConfigError(series.name + ": empty training split");
  Rng noise = make_rng(model.seed, kNoiseStream);
  auto traj = collect_states(model, series.values, 0, s.washout, s.train,
                             ReservoirState<double>::zero(model.units(), model.outputs()), &noise);
  model.readout = train_readout(traj, ridge_lambda, model.hyper.readout);
  return {std::move(model), std::move(traj.final_state)};
}

TrainedEsn restore_trained(EsnModel<double> model, const TimeSeries& series) {
  series.validate();
  if (!model.trained()) throw ConfigError("restore_trained: model has no readout");
  if (model.outputs() != series.dimension()) throw ConfigError("model output dimension does not match the series");
  const auto& s = series.splits;
  Rng noise = make_rng(model.seed, kNoiseStream);
  auto traj = collect_states(model, series.values, 0, s.washout, s.train,
                             ReservoirState<double>::zero(model.units(), model.outputs()), &noise);
  return {std::move(model), std::move(traj.final_state)};
}

namespace {

Vector<double> flat(const Matrix<double>& m) { return m.reshaped(); }

}  // namespace

EvalReport evaluate_test(const TrainedEsn& trained, const TimeSeries& series, const TestProtocol& protocol,
                         VarianceConvention convention, bool noise_in_free_run) {
  const auto& s = series.splits;
  const auto& model = trained.model;
  if (s.test < 1) throw ConfigError(series.name + ": empty test split");
  const Index region = protocol.variance_after_train ? s.validate_begin() : s.test_begin();
  const Vector<double> reference = flat(series.raw(region, s.total() - region));
  const double var = variance(reference, convention);

  ReservoirState<double> state = trained.state;
  teacher_force(model, state, Matrix<double>(series.values.middleRows(s.validate_begin(), s.validate)), nullptr,
                s.validate_begin());

  EvalReport report;
  report.normalization_variance = var;
  Matrix<double> predictions;
  Index first = 0;
  if (protocol.mode == PredictionMode::one_step) {
    teacher_force(model, state, Matrix<double>(series.values.middleRows(s.test_begin(), s.test)), &predictions,
                  s.test_begin());
    first = s.test_begin();
    report.horizon = s.test;
  } else {
    if (protocol.horizon < 1 || protocol.teacher_forced < 0 || protocol.teacher_forced + protocol.horizon > s.test) {
      throw ConfigError(series.name + ": test protocol needs " +
                        std::to_string(protocol.teacher_forced + protocol.horizon) + " test rows, split has " +
                        std::to_string(s.test));
    }
    teacher_force(model, state, Matrix<double>(series.values.middleRows(s.test_begin(), protocol.teacher_forced)),
                  nullptr, s.test_begin());
    Rng noise = make_rng(model.seed, kNoiseStream + 100);
    predictions = free_run(model, state, protocol.horizon, noise_in_free_run ? &noise : nullptr);
    first = s.test_begin() + protocol.teacher_forced;
    report.horizon = protocol.horizon;
  }

  Matrix<double> pred_raw = predictions;
  if (!series.transform.identity()) {
    pred_raw = pred_raw.unaryExpr([&](double y) { return series.transform.inverse(y); });
  }
  const Vector<double> target = flat(series.raw(first, predictions.rows()));
  const Vector<double> pred = flat(pred_raw);
  if (!pred.allFinite()) throw NumericError("prediction left the invertible range of the series transform");
  const Vector<double> residual = target - pred;
  report.residuals.assign(residual.data(), residual.data() + residual.size());

  report.set("mse", mse(target, pred));
  if (protocol.mode == PredictionMode::one_step) {
    report.set("nmse", nmse(target, pred, var));
    report.set("nrmse", std::sqrt(nmse(target, pred, var)));
  } else {
    report.set("nrmse_horizon", nrmse_over_horizon(target, pred, protocol.horizon, var));
    if (protocol.at_step >= 1 && protocol.at_step <= protocol.horizon) {
      const RunPair<double> run{target, pred};
      const double at = nrmse_at_step<double>(std::span(&run, 1), protocol.at_step, var);
      report.metrics["nrmse_at_step"] = at;
      if (at > 0.0) report.set("log10_nrmse_at_step", std::log10(at));
    }
    const Vector<double> trace = absolute_error_trace(target, pred);
    report.set("abs_error_max", trace.maxCoeff());
    report.set("abs_error_mean", trace.mean());
    if (trace.maxCoeff() > 0.0) report.set("log10_abs_error_max", std::log10(trace.maxCoeff()));
    if (trace.mean() > 0.0) report.set("log10_abs_error_mean", std::log10(trace.mean()));
  }
  return report;
}

}  // namespace evoesn
