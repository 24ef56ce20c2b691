#include "evoesn/metrics.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace evoesn;

namespace {

long double direct_mean(const Vector<double>& v) {
  long double s = 0;
  for (Index i = 0; i < v.size(); ++i) s += v(i);
  return s / v.size();
}

long double direct_variance(const Vector<double>& v) {
  const long double m = direct_mean(v);
  long double s = 0;
  for (Index i = 0; i < v.size(); ++i) s += (v(i) - m) * (v(i) - m);
  return s / v.size();
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("predicting the mean gives unit NMSE") {
  Rng rng = make_rng(1, 1);
  const Vector<double> t = oracle::random_vector(100, rng);
  const Vector<double> p = Vector<double>::Constant(100, t.mean());
  CHECK(nmse(t, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(nmse(t, t) == 0.0);
}

TEST_CASE("NMSE and NRMSE against direct formulas") {
  Rng rng = make_rng(1, 2);
  const Vector<double> t = oracle::random_vector(20, rng);
  const Vector<double> p = t + oracle::random_vector(20, rng, 0.1);
  long double ss = 0;
  for (Index i = 0; i < 20; ++i) ss += (t(i) - p(i)) * (t(i) - p(i));
  const long double expected = ss / 20 / direct_variance(t);
  CHECK(std::abs(nmse(t, p) - static_cast<double>(expected)) < 1e-12);
  CHECK(std::abs(nrmse_over_horizon(t, p, 20) - static_cast<double>(std::sqrt(expected))) < 1e-12);
  const double n = nrmse_over_horizon(t, p, 20, variance(t));
  CHECK(std::abs(n * n - nmse(t, p)) < 1e-12);
}

TEST_CASE("sample and population variance") {
  Vector<double> v(4);
  v << 1, 2, 3, 4;
  CHECK(variance(v) == doctest::Approx(1.25));
  CHECK(variance(v, VarianceConvention::sample) == doctest::Approx(5.0 / 3.0));
  CHECK_THROWS_AS(variance(Vector<double>(Vector<double>::Ones(1)), VarianceConvention::sample), DomainError);
}

TEST_CASE("zero variance is a domain error") {
  const Vector<double> flat = Vector<double>::Ones(10);
  CHECK_THROWS_AS(nmse(flat, flat), DomainError);
  CHECK_THROWS_AS(nrmse_over_horizon(flat, flat, 5), DomainError);
  const RunPair<double> run{flat, flat};
  CHECK_THROWS_AS(nrmse_at_step<double>(std::span(&run, 1), 3, 0.0), DomainError);
}

TEST_CASE("step residual uses only step H") {
  Vector<double> t = Vector<double>::Zero(10), p = Vector<double>::Zero(10);
  p(2) = 0.5;   // step 3
  p(6) = 100;   // ignored
  const RunPair<double> run{t, p};
  CHECK(nrmse_at_step<double>(std::span(&run, 1), 3, 0.25) == doctest::Approx(1.0));
  std::vector<RunPair<double>> runs{run, RunPair<double>{t, t}};
  CHECK(nrmse_at_step<double>(runs, 3, 0.25) == doctest::Approx(std::sqrt(0.5)));
  CHECK(nrmse_at_step<double>(std::span(runs.data() + 1, 1), 3, 0.25) == 0.0);
  CHECK_THROWS_AS(nrmse_at_step<double>(runs, 11, 0.25), DomainError);
}

TEST_CASE("affine invariance") {
  Rng rng = make_rng(1, 3);
  const Vector<double> t = oracle::random_vector(200, rng);
  const Vector<double> p = t + oracle::random_vector(200, rng, 0.2);
  const double a = 37.5, b = -4.0;
  const Vector<double> ta = (a * t.array() + b).matrix();
  const Vector<double> pa = (a * p.array() + b).matrix();
  CHECK(std::abs(nmse(t, p) - nmse(ta, pa)) < 1e-9);
  CHECK(std::abs(nrmse_over_horizon(t, p, 84) - nrmse_over_horizon(ta, pa, 84, variance(ta))) < 1e-9);
}

TEST_CASE("paired shuffling leaves NMSE unchanged") {
  Rng rng = make_rng(1, 4);
  const Vector<double> t = oracle::random_vector(64, rng);
  const Vector<double> p = oracle::random_vector(64, rng);
  std::vector<Index> order(64);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Vector<double> ts(64), ps(64);
  for (Index i = 0; i < 64; ++i) {
    ts(i) = t(order[i]);
    ps(i) = p(order[i]);
  }
  CHECK(std::abs(nmse(t, p) - nmse(ts, ps)) < 1e-12);
}

TEST_CASE("absolute error trace") {
  Vector<double> t(3), p(3);
  t << 1, 2, 3;
  p << 1, 2.5, 1;
  const Vector<double> e = absolute_error_trace(t, p);
  CHECK(e(0) == 0.0);
  CHECK(e(1) == 0.5);
  CHECK(e(2) == 2.0);
  CHECK(log10_trace(e)(2) == doctest::Approx(std::log10(2.0)));
  CHECK(absolute_error_trace(t, t).isZero(0));
  CHECK_THROWS_AS(absolute_error_trace(t, Vector<double>(Vector<double>::Ones(2))), DomainError);
}

}
