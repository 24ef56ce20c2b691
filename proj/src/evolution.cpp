#include "evoesn/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace evoesn {

std::string to_string(FitnessMetric metric) {
  switch (metric) {
    case FitnessMetric::nrmse_horizon: return "nrmse_horizon";
    case FitnessMetric::nrmse_at_step: return "nrmse_at_step";
    case FitnessMetric::nmse_one_step: return "nmse_one_step";
  }
  return "?";
}

FitnessMetric parse_fitness_metric(const std::string& name) {
  if (name == "nrmse_horizon") return FitnessMetric::nrmse_horizon;
  if (name == "nrmse_at_step") return FitnessMetric::nrmse_at_step;
  if (name == "nmse_one_step") return FitnessMetric::nmse_one_step;
  throw ConfigError("unknown fitness metric '" + name + "'");
}

EvoProblem::EvoProblem(EsnModel<double> base, TimeSeries series, EvoSettings settings)
    : base_(std::move(base)), series_(std::move(series)), settings_(settings) {
  series_.validate();
  base_.readout.reset();
  codec_ = std::make_shared<const FourierCodec<double>>(base_.layout);
  if (settings_.coefficients < 1 || settings_.coefficients > base_.layout.size()) {
    throw ConfigError("evolve: coefficient count C=" + std::to_string(settings_.coefficients) + " must lie in [1, M=" +
                      std::to_string(base_.layout.size()) + "]");
  }
  const auto& s = series_.splits;
  if (s.validate < 1) throw ConfigError(series_.name + ": evolution needs a nonempty validation split");
  validation_raw_ = series_.raw(s.validate_begin(), s.validate).reshaped();
  validation_variance_ = variance(validation_raw_, settings_.variance);
  if (!(validation_variance_ > 0.0)) throw DomainError(series_.name + ": validation split has zero variance");

  const auto& f = settings_.fitness;
  if (f.metric != FitnessMetric::nmse_one_step) {
    if (f.tasks < 1 || f.horizon < 1) throw ConfigError("fitness: tasks and horizon must be positive");
    if (f.horizon > s.validate) {
      throw ConfigError("fitness: horizon " + std::to_string(f.horizon) + " exceeds the validation split (" +
                        std::to_string(s.validate) + ")");
    }
    // windows drawn once and shared by every evaluation
    Rng rng = make_rng(base_.seed, 0x77);
    std::uniform_int_distribution<Index> start(0, s.validate - f.horizon);
    for (Index k = 0; k < f.tasks; ++k) windows_.push_back(start(rng));
    std::sort(windows_.begin(), windows_.end());
  }
}

EsnModel<double> EvoProblem::decode_model(const Vector<double>& genes) const {
  EsnModel<double> model = base_;
  model.readout.reset();
  model.reservoir = codec_->decode(Chromosome<double>{genes});
  if (settings_.rescale && model.hyper.spectral_radius) {
    rescale_spectral_radius(model.reservoir, *model.hyper.spectral_radius);
  }
  return model;
}

TrainedEsn EvoProblem::train(const Vector<double>& genes) const {
  return train_on_series(decode_model(genes), series_, settings_.ridge_lambda);
}

double EvoProblem::score(const TrainedEsn& trained) const {
  const auto& s = series_.splits;
  const auto& model = trained.model;
  const auto& f = settings_.fitness;
  const Matrix<double> validation = series_.values.middleRows(s.validate_begin(), s.validate);
  auto to_raw = [&](Matrix<double> m) {
    if (!series_.transform.identity()) m = m.unaryExpr([&](double y) { return series_.transform.inverse(y); });
    return Vector<double>(m.reshaped());
  };

  ReservoirState<double> state = trained.state;
  if (f.metric == FitnessMetric::nmse_one_step) {
    Matrix<double> predictions;
    teacher_force(model, state, validation, &predictions, s.validate_begin());
    return nmse(validation_raw_, to_raw(predictions), validation_variance_);
  }

  double total = 0.0;
  Index position = 0;
  for (Index start : windows_) {
    teacher_force(model, state, Matrix<double>(validation.middleRows(position, start - position)), nullptr,
                  s.validate_begin() + position);
    position = start;
    ReservoirState<double> branch = state;
    const Vector<double> pred = to_raw(free_run(model, branch, f.horizon));
    const Vector<double> target = validation_raw_.segment(start, f.horizon);
    if (f.metric == FitnessMetric::nrmse_horizon) {
      total += nrmse_over_horizon(target, pred, f.horizon, validation_variance_);
    } else {
      const RunPair<double> run{target, pred};
      total += nrmse_at_step<double>(std::span(&run, 1), f.horizon, validation_variance_);
    }
  }
  return total / static_cast<double>(windows_.size());
}

FitnessResult EvoProblem::evaluate(const Vector<double>& genes) const {
  try {
    const double value = score(train(genes));
    if (!std::isfinite(value) || value >= settings_.divergence_penalty) return {settings_.divergence_penalty, true};
    return {value, false};
  } catch (const NumericError&) {
    return {settings_.divergence_penalty, true};
  } catch (const LinearAlgebraError&) {
    return {settings_.divergence_penalty, true};
  }
}

Vector<double> EvoProblem::initial_genes(Index individual) const {
  Rng rng = make_rng(base_.seed, 1000 + static_cast<std::uint64_t>(individual));
  const SparseMatrix<double> w = sample_reservoir<double>(base_.layout, base_.hyper, rng);
  return codec_->encode(w, settings_.coefficients).coeffs;
}

FitnessFunction EvoProblem::fitness_function() const {
  return [this](const Vector<double>& genes) { return evaluate(genes); };
}

}  // namespace evoesn
