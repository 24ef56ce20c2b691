#pragma once

// Echo state network core.
//
//   x(t) = (1 - a) x(t-1) + a f(W_in u(t) + W_h x(t-1) + W_fb y(t-1) + eps(t))
//   y(t) = g(W_out [u(t); x(t)])
//
// u(t) always ends with a constant bias channel. For series prediction the
// previous value of the series drives the reservoir through W_in
// (autoregressive wiring), through W_fb (feedback wiring), or both.

#include "evoesn/common.hpp"
#include "evoesn/reservoir_layout.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>

namespace evoesn {

enum class Activation { tanh, identity };

inline std::string to_string(Activation a) { return a == Activation::tanh ? "tanh" : "identity"; }

inline Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "identity" || name == "linear") return Activation::identity;
  throw ConfigError("unknown activation '" + name + "' (expected tanh or identity)");
}

template <typename Derived>
auto apply_activation(Activation a, const Eigen::ArrayBase<Derived>& z) {
  using Scalar = typename Derived::Scalar;
  Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic> out = z;
  if (a == Activation::tanh) out = out.tanh();
  return out;
}

struct EsnHyperparameters {
  Index units = 100;
  double density = 0.2;
  /// Reservoir is rescaled to this spectral radius when set.
  std::optional<double> spectral_radius = 0.8;
  /// Half-width of the uniform draws.
  double reservoir_range = 1.0;
  double input_scaling = 1.0;
  double feedback_scaling = 1.0;
  /// Series dimension L.
  Index outputs = 1;
  /// Previous series value enters through W_in.
  bool autoregressive = true;
  /// W_fb present; previous series value enters through W_fb.
  bool feedback = false;
  double leak_rate = 1.0;
  double noise_scale = 0.0;
  double input_bias = 0.0;
  Activation activation = Activation::tanh;
  Activation readout = Activation::identity;

  Index data_inputs() const { return autoregressive ? outputs : 0; }
  Index input_dim() const { return data_inputs() + 1; }

  void validate() const {
    if (units < 1) throw ConfigError("units must be positive");
    if (outputs < 1) throw ConfigError("outputs must be positive");
    if (!(leak_rate > 0.0 && leak_rate <= 1.0)) throw ConfigError("leak_rate must lie in (0, 1]");
    if (noise_scale < 0.0) throw ConfigError("noise_scale must be nonnegative");
    if (spectral_radius && !(*spectral_radius > 0.0)) throw ConfigError("spectral_radius must be positive");
  }
};

template <typename Scalar>
struct EsnModel {
  ReservoirLayout layout;
  EsnHyperparameters hyper;
  std::uint64_t seed = 0;
  Matrix<Scalar> input_weights;                   // N x n
  SparseMatrix<Scalar> reservoir;                 // N x N, pattern == layout
  std::optional<Matrix<Scalar>> feedback_weights;  // N x L
  std::optional<Matrix<Scalar>> readout;           // L x (n + N)

  Index units() const { return reservoir.rows(); }
  Index input_dim() const { return input_weights.cols(); }
  Index outputs() const { return hyper.outputs; }
  bool trained() const { return readout.has_value(); }
};

/// Running condition of a reservoir: the state x(t-1) and the series value
/// y(t-1) that drives the next step.
template <typename Scalar>
struct ReservoirState {
  Vector<Scalar> x;
  Vector<Scalar> last_value;

  static ReservoirState zero(Index units, Index outputs) {
    return {Vector<Scalar>::Zero(units), Vector<Scalar>::Zero(outputs)};
  }
};

template <typename Scalar>
struct StateTrajectory {
  Matrix<Scalar> states;   // T x N
  Matrix<Scalar> inputs;   // T x n (bias channel included)
  Matrix<Scalar> targets;  // T x L
  ReservoirState<Scalar> final_state;

  Index length() const { return states.rows(); }

  /// Rows of [u(t); x(t)] as used by the readout.
  Matrix<Scalar> design() const {
    Matrix<Scalar> d(states.rows(), inputs.cols() + states.cols());
    d << inputs, states;
    return d;
  }
};

// --- spectral radius -------------------------------------------------------

/// max |lambda| over the eigenvalues, from a dense eigendecomposition.
template <typename Derived>
typename Derived::Scalar spectral_radius(const Eigen::MatrixBase<Derived>& w) {
  using Scalar = typename Derived::Scalar;
  if (w.rows() != w.cols()) throw DomainError("spectral_radius: matrix must be square");
  if (!w.allFinite()) throw NumericError("spectral_radius: non-finite matrix entries");
  if (w.rows() == 0) return Scalar(0);
  Eigen::EigenSolver<Matrix<Scalar>> solver(w.eval(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw LinearAlgebraError("spectral_radius: eigensolver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar spectral_radius(const SparseMatrix<Scalar>& w) {
  return spectral_radius(Matrix<Scalar>(w));
}

/// Multiplies `w` by target / rho(w). Returns false (and leaves `w` alone)
/// when rho(w) is zero.
template <typename Scalar>
bool rescale_spectral_radius(SparseMatrix<Scalar>& w, Scalar target) {
  const Scalar rho = spectral_radius(w);
  if (!(rho > Scalar(0))) return false;
  w *= target / rho;
  return true;
}

// --- initialization --------------------------------------------------------

namespace detail {

template <typename Scalar>
Matrix<Scalar> uniform_matrix(Index rows, Index cols, double half_width, Rng& rng) {
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  Matrix<Scalar> m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = static_cast<Scalar>(dist(rng));
  return m;
}

}  // namespace detail

enum RngStream : std::uint64_t {
  kLayoutStream = 1,
  kInputStream = 2,
  kReservoirStream = 3,
  kFeedbackStream = 4,
  kNoiseStream = 5,
};

/// Reservoir values drawn uniformly at the layout positions and rescaled to
/// the target spectral radius (if set).
template <typename Scalar>
SparseMatrix<Scalar> sample_reservoir(const ReservoirLayout& layout, const EsnHyperparameters& hyper, Rng& rng) {
  std::uniform_real_distribution<double> dist(-hyper.reservoir_range, hyper.reservoir_range);
  Vector<Scalar> values(layout.size());
  for (Index k = 0; k < layout.size(); ++k) values(k) = static_cast<Scalar>(dist(rng));
  SparseMatrix<Scalar> w = reservoir_from_values(layout, values);
  if (hyper.spectral_radius && !rescale_spectral_radius(w, static_cast<Scalar>(*hyper.spectral_radius))) {
    throw InitError("init_esn: sampled reservoir has spectral radius 0 and cannot be rescaled (M = " +
                    std::to_string(layout.size()) + ")");
  }
  return w;
}

template <typename Scalar>
EsnModel<Scalar> init_esn(const ReservoirLayout& layout, const EsnHyperparameters& hyper, std::uint64_t seed) {
  hyper.validate();
  if (layout.units() != hyper.units) throw ConfigError("init_esn: layout and hyperparameters disagree on N");
  EsnModel<Scalar> model;
  model.layout = layout;
  model.hyper = hyper;
  model.seed = seed;
  Rng input_rng = make_rng(seed, kInputStream);
  model.input_weights = detail::uniform_matrix<Scalar>(hyper.units, hyper.input_dim(), hyper.input_scaling, input_rng);
  Rng reservoir_rng = make_rng(seed, kReservoirStream);
  model.reservoir = sample_reservoir<Scalar>(layout, hyper, reservoir_rng);
  if (hyper.feedback) {
    Rng feedback_rng = make_rng(seed, kFeedbackStream);
    model.feedback_weights =
        detail::uniform_matrix<Scalar>(hyper.units, hyper.outputs, hyper.feedback_scaling, feedback_rng);
  }
  return model;
}

/// Samples the layout from the same seed, then initializes the weights.
template <typename Scalar>
EsnModel<Scalar> init_esn(const EsnHyperparameters& hyper, std::uint64_t seed) {
  Rng layout_rng = make_rng(seed, kLayoutStream);
  return init_esn<Scalar>(ReservoirLayout::sample(hyper.units, hyper.density, layout_rng), hyper, seed);
}

// --- dynamics --------------------------------------------------------------

/// One state update. `y_prev` is ignored when the model has no feedback;
/// `noise` (already scaled) may be null.
template <typename Scalar>
Vector<Scalar> step(const EsnModel<Scalar>& model, const std::type_identity_t<Vector<Scalar>>& x_prev,
                    const std::type_identity_t<Vector<Scalar>>& u, const std::type_identity_t<Vector<Scalar>>* y_prev,
                    const std::type_identity_t<Vector<Scalar>>* noise) {
  if (x_prev.size() != model.units() || u.size() != model.input_dim()) {
    throw DomainError("step: dimension mismatch (state " + std::to_string(x_prev.size()) + "/" +
                      std::to_string(model.units()) + ", input " + std::to_string(u.size()) + "/" +
                      std::to_string(model.input_dim()) + ")");
  }
  Vector<Scalar> pre = model.input_weights * u;
  pre.noalias() += model.reservoir * x_prev;
  if (model.feedback_weights && y_prev) {
    if (y_prev->size() != model.feedback_weights->cols()) throw DomainError("step: feedback dimension mismatch");
    pre.noalias() += *model.feedback_weights * *y_prev;
  }
  if (noise) pre += *noise;
  const Scalar a = static_cast<Scalar>(model.hyper.leak_rate);
  Vector<Scalar> activated = apply_activation(model.hyper.activation, pre.array()).matrix();
  if (a == Scalar(1)) return activated;
  return (Scalar(1) - a) * x_prev + a * activated;
}

/// u(t) = [data; bias].
template <typename Scalar>
Vector<Scalar> make_input(const EsnModel<Scalar>& model, const Vector<Scalar>& previous_value) {
  Vector<Scalar> u(model.input_dim());
  if (model.hyper.autoregressive) u.head(model.hyper.outputs) = previous_value;
  u(u.size() - 1) = static_cast<Scalar>(model.hyper.input_bias);
  return u;
}

template <typename Scalar>
Vector<Scalar> readout_output(const EsnModel<Scalar>& model, const Vector<Scalar>& u, const Vector<Scalar>& x) {
  if (!model.readout) throw DomainError("readout requested from an untrained model");
  const auto& w = *model.readout;
  Vector<Scalar> z = w.leftCols(u.size()) * u;
  z.noalias() += w.rightCols(x.size()) * x;
  return apply_activation(model.hyper.readout, z.array()).matrix();
}

/// Uniform noise in (-noise_scale, noise_scale) for one step.
template <typename Scalar>
Vector<Scalar> draw_noise(Index units, double scale, Rng& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Vector<Scalar> v(units);
  for (Index i = 0; i < units; ++i) v(i) = static_cast<Scalar>(dist(rng));
  return v;
}

/// Teacher-forced run over explicit input and target rows. Row t of `data`
/// holds the external part of u(t); the feedback at step t is targets(t-1)
/// (or `start.last_value` at t = 0). The first `washout` rows are run but not
/// recorded. With `noise_rng` null no noise is injected.
template <typename Scalar>
StateTrajectory<Scalar> collect_states(const EsnModel<Scalar>& model, const Matrix<Scalar>& data,
                                       const Matrix<Scalar>& targets, Index washout,
                                       ReservoirState<Scalar> start, Rng* noise_rng) {
  const Index total = targets.rows();
  if (data.rows() != total) throw DomainError("collect_states: input and target lengths differ");
  if (data.cols() + 1 != model.input_dim()) throw DomainError("collect_states: input width mismatch");
  if (washout < 0 || washout > total) throw DomainError("collect_states: washout outside the sequence");
  const Index kept = total - washout;
  StateTrajectory<Scalar> traj;
  traj.states.resize(kept, model.units());
  traj.inputs.resize(kept, model.input_dim());
  traj.targets = targets.bottomRows(kept);
  const bool noisy = noise_rng && model.hyper.noise_scale > 0.0;
  Vector<Scalar> u(model.input_dim());
  Vector<Scalar> noise;
  for (Index t = 0; t < total; ++t) {
    u.head(data.cols()) = data.row(t).transpose();
    u(u.size() - 1) = static_cast<Scalar>(model.hyper.input_bias);
    if (noisy) noise = draw_noise<Scalar>(model.units(), model.hyper.noise_scale, *noise_rng);
    start.x = step(model, start.x, u, &start.last_value, noisy ? &noise : nullptr);
    if (!start.x.allFinite()) throw NumericError("collect_states: non-finite reservoir state", t);
    start.last_value = targets.row(t).transpose();
    if (t >= washout) {
      traj.states.row(t - washout) = start.x.transpose();
      traj.inputs.row(t - washout) = u.transpose();
    }
  }
  traj.final_state = std::move(start);
  return traj;
}

/// Series form: target at row t is values(t), the driving value is
/// values(t-1). Runs rows [begin, begin + washout + train).
template <typename Scalar>
StateTrajectory<Scalar> collect_states(const EsnModel<Scalar>& model, const Matrix<Scalar>& values, Index begin,
                                       Index washout, Index train, ReservoirState<Scalar> start, Rng* noise_rng) {
  const Index total = washout + train;
  if (begin < 0 || begin + total > values.rows()) throw DomainError("collect_states: range outside the series");
  const Index width = model.hyper.data_inputs();
  Matrix<Scalar> data(total, width);
  if (width > 0) {
    for (Index t = 0; t < total; ++t) {
      if (t == 0) data.row(t) = start.last_value.transpose();
      else data.row(t) = values.row(begin + t - 1);
    }
  }
  return collect_states(model, data, Matrix<Scalar>(values.middleRows(begin, total)), washout, std::move(start),
                        noise_rng);
}

// --- readout training ------------------------------------------------------

/// Ridge solution of W_out (L x d) for the rows of `design` (T x d) and
/// `targets` (T x L): W_out = Z^T X (X^T X + lambda I)^-1. With a tanh
/// readout the fit is done on artanh(targets).
template <typename Scalar>
Matrix<Scalar> train_readout(const Matrix<Scalar>& design, const Matrix<Scalar>& targets, Scalar lambda,
                             Activation readout_fn) {
  if (design.rows() == 0) throw DomainError("train_readout: empty trajectory");
  if (design.rows() != targets.rows()) throw DomainError("train_readout: design and target rows differ");
  if (lambda < Scalar(0)) throw DomainError("train_readout: ridge lambda must be nonnegative");
  Matrix<Scalar> z = targets;
  if (readout_fn == Activation::tanh) {
    if ((z.array().abs() >= Scalar(1)).any()) {
      throw DomainError("train_readout: tanh readout needs every target in (-1, 1)");
    }
    z = z.array().atanh().matrix();
  }
  const Index d = design.cols();
  Matrix<Scalar> gram = Matrix<Scalar>::Zero(d, d);
  gram.template selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
  gram = gram.template selfadjointView<Eigen::Lower>();
  gram.diagonal().array() += lambda;
  const Matrix<Scalar> rhs = design.transpose() * z;
  Eigen::LDLT<Matrix<Scalar>> ldlt(gram);
  if (ldlt.info() != Eigen::Success) throw LinearAlgebraError("train_readout: factorization failed");
  const auto pivots = ldlt.vectorD().cwiseAbs();
  const Scalar pivot_floor = Scalar(gram.rows()) * Eigen::NumTraits<Scalar>::epsilon() * pivots.maxCoeff();
  if (lambda == Scalar(0) && !(pivots.minCoeff() > pivot_floor)) {
    throw LinearAlgebraError("train_readout: normal matrix is singular with lambda = 0; use lambda > 0");
  }
  Matrix<Scalar> solution = ldlt.solve(rhs);
  if (!solution.allFinite()) throw LinearAlgebraError("train_readout: non-finite solution; use lambda > 0");
  return solution.transpose();
}

template <typename Scalar>
Matrix<Scalar> train_readout(const StateTrajectory<Scalar>& traj, Scalar lambda, Activation readout_fn) {
  return train_readout(traj.design(), traj.targets, lambda, readout_fn);
}

// --- exploitation ----------------------------------------------------------

/// Teacher-forced pass over `values` (rows are consecutive series values).
/// Returns the one-step-ahead prediction made before each row is revealed
/// (requires a trained readout when `predictions` is requested).
template <typename Scalar>
void teacher_force(const EsnModel<Scalar>& model, ReservoirState<Scalar>& state,
                   const std::type_identity_t<Matrix<Scalar>>& values,
                   std::type_identity_t<Matrix<Scalar>>* predictions = nullptr, Index step_offset = 0) {
  if (predictions) predictions->resize(values.rows(), model.outputs());
  for (Index t = 0; t < values.rows(); ++t) {
    const Vector<Scalar> u = make_input(model, state.last_value);
    state.x = step(model, state.x, u, &state.last_value, static_cast<const Vector<Scalar>*>(nullptr));
    if (!state.x.allFinite()) throw NumericError("teacher_force: non-finite reservoir state", step_offset + t);
    if (predictions) predictions->row(t) = readout_output(model, u, state.x).transpose();
    state.last_value = values.row(t).transpose();
  }
}

/// Autonomous run: each prediction is fed back (and forward, for
/// autoregressive wiring) as the next driving value.
template <typename Scalar>
Matrix<Scalar> free_run(const EsnModel<Scalar>& model, ReservoirState<Scalar>& state, Index horizon,
                        std::type_identity_t<Rng>* noise_rng = nullptr) {
  if (horizon < 0) throw DomainError("free_run: negative horizon");
  Matrix<Scalar> out(horizon, model.outputs());
  const bool noisy = noise_rng && model.hyper.noise_scale > 0.0;
  Vector<Scalar> noise;
  for (Index t = 0; t < horizon; ++t) {
    const Vector<Scalar> u = make_input(model, state.last_value);
    if (noisy) noise = draw_noise<Scalar>(model.units(), model.hyper.noise_scale, *noise_rng);
    state.x = step(model, state.x, u, &state.last_value, noisy ? &noise : nullptr);
    Vector<Scalar> y = readout_output(model, u, state.x);
    if (!state.x.allFinite() || !y.allFinite()) throw NumericError("free_run: non-finite prediction", t);
    out.row(t) = y.transpose();
    state.last_value = std::move(y);
  }
  return out;
}

/// Teacher-forced warm-up over `warmup` rows, then `horizon` free-run steps.
template <typename Scalar>
Matrix<Scalar> predict(const EsnModel<Scalar>& model, ReservoirState<Scalar> state, const Matrix<Scalar>& warmup,
                       Index horizon, Rng* noise_rng = nullptr) {
  if (!model.trained()) throw DomainError("predict: readout is not trained");
  teacher_force(model, state, warmup);
  return free_run(model, state, horizon, noise_rng);
}

}  // namespace evoesn
