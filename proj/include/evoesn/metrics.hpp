#pragma once

// Error measures for free-run and one-step prediction.
//
// All normalized errors divide by a reference variance. By default that is
// the population variance of the full reference signal (the whole test
// region for the benchmark tasks), not of the evaluated window alone.

#include "evoesn/common.hpp"

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace evoesn {

enum class VarianceConvention { population, sample };

template <typename Derived>
typename Derived::Scalar variance(const Eigen::MatrixBase<Derived>& signal,
                                  VarianceConvention convention = VarianceConvention::population) {
  using Scalar = typename Derived::Scalar;
  const Index n = signal.size();
  if (n == 0 || (convention == VarianceConvention::sample && n < 2)) {
    throw DomainError("variance: not enough samples");
  }
  const Scalar mean = signal.mean();
  const Scalar ss = (signal.array() - mean).square().sum();
  return ss / static_cast<Scalar>(convention == VarianceConvention::sample ? n - 1 : n);
}

namespace detail {

template <typename Scalar>
Scalar checked_variance(Scalar v) {
  if (!(v > Scalar(0))) throw DomainError("normalization variance is zero");
  return v;
}

template <typename A, typename B>
void require_length(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, Index needed, const char* what) {
  if (a.size() < needed || b.size() < needed) {
    throw DomainError(std::string(what) + ": sequences shorter than " + std::to_string(needed));
  }
}

}  // namespace detail

template <typename A, typename B>
typename A::Scalar mse(const Eigen::MatrixBase<A>& targets, const Eigen::MatrixBase<B>& predictions) {
  if (targets.size() != predictions.size() || targets.size() == 0) throw DomainError("mse: length mismatch");
  return (targets - predictions).squaredNorm() / static_cast<typename A::Scalar>(targets.size());
}

/// sqrt(mean_{t<H} (target_t - pred_t)^2 / reference_variance).
template <typename A, typename B>
typename A::Scalar nrmse_over_horizon(const Eigen::MatrixBase<A>& targets, const Eigen::MatrixBase<B>& predictions,
                                      Index horizon, typename A::Scalar reference_variance) {
  if (horizon < 1) throw DomainError("nrmse_over_horizon: horizon must be positive");
  detail::require_length(targets, predictions, horizon, "nrmse_over_horizon");
  detail::checked_variance(reference_variance);
  return std::sqrt(mse(targets.head(horizon), predictions.head(horizon)) / reference_variance);
}

/// Normalized by the variance of `targets` itself.
template <typename A, typename B>
typename A::Scalar nrmse_over_horizon(const Eigen::MatrixBase<A>& targets, const Eigen::MatrixBase<B>& predictions,
                                      Index horizon) {
  return nrmse_over_horizon(targets, predictions, horizon, variance(targets));
}

/// One free run: the target and prediction sequences starting at the first
/// autonomous step.
template <typename Scalar>
struct RunPair {
  Vector<Scalar> targets;
  Vector<Scalar> predictions;
};

/// sqrt(mean over runs of (target_H - pred_H)^2 / reference_variance), using
/// only the residual at the H-th autonomous step (1-based).
template <typename Scalar>
Scalar nrmse_at_step(std::span<const RunPair<Scalar>> runs, Index horizon, Scalar reference_variance) {
  if (runs.empty()) throw DomainError("nrmse_at_step: no runs");
  if (horizon < 1) throw DomainError("nrmse_at_step: horizon must be positive");
  detail::checked_variance(reference_variance);
  Scalar sum(0);
  for (const auto& run : runs) {
    detail::require_length(run.targets, run.predictions, horizon, "nrmse_at_step");
    const Scalar r = run.targets(horizon - 1) - run.predictions(horizon - 1);
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<Scalar>(runs.size()) / reference_variance);
}

template <typename A, typename B>
typename A::Scalar nmse(const Eigen::MatrixBase<A>& targets, const Eigen::MatrixBase<B>& predictions,
                        typename A::Scalar reference_variance) {
  detail::checked_variance(reference_variance);
  return mse(targets, predictions) / reference_variance;
}

template <typename A, typename B>
typename A::Scalar nmse(const Eigen::MatrixBase<A>& targets, const Eigen::MatrixBase<B>& predictions) {
  return nmse(targets, predictions, variance(targets));
}

/// |target_t - pred_t| per step. Callers pass back-scaled signals.
template <typename A, typename B>
Vector<typename A::Scalar> absolute_error_trace(const Eigen::MatrixBase<A>& targets,
                                                const Eigen::MatrixBase<B>& predictions) {
  if (targets.size() != predictions.size()) throw DomainError("absolute_error_trace: length mismatch");
  return (targets - predictions).cwiseAbs();
}

template <typename Derived>
Vector<typename Derived::Scalar> log10_trace(const Eigen::MatrixBase<Derived>& trace) {
  return trace.array().log10().matrix();
}

/// Named metric values plus the residual trace they were computed from.
struct EvalReport {
  std::map<std::string, double> metrics;
  std::vector<double> residuals;  // target - prediction, per step
  Index horizon = 0;
  double normalization_variance = 0.0;

  void set(const std::string& name, double value) {
    if (!std::isfinite(value)) throw NumericError("metric '" + name + "' is not finite");
    metrics[name] = value;
  }
  double get(const std::string& name) const {
    auto it = metrics.find(name);
    if (it == metrics.end()) throw DomainError("metric '" + name + "' not present in report");
    return it->second;
  }
  bool has(const std::string& name) const { return metrics.count(name) != 0; }
};

}  // namespace evoesn
