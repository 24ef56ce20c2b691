#include "evoesn/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace evoesn {

Transform Transform::then(const Transform& next) const {
  if (squash) throw ConfigError("cannot compose a transform after a squashing transform");
  return {next.scale * scale, next.scale * shift + next.shift, next.squash};
}

Matrix<double> TimeSeries::raw() const { return raw(0, length()); }

Matrix<double> TimeSeries::raw(Index begin, Index count) const {
  Matrix<double> out = values.middleRows(begin, count);
  if (!transform.identity()) out = out.unaryExpr([this](double y) { return transform.inverse(y); });
  return out;
}

void TimeSeries::validate() const {
  if (splits.washout < 0 || splits.train < 0 || splits.validate < 0 || splits.test < 0) {
    throw ConfigError(name + ": split lengths must be nonnegative");
  }
  if (splits.total() > length()) {
    throw ConfigError(name + ": splits need " + std::to_string(splits.total()) + " points but the series has " +
                      std::to_string(length()));
  }
  if (!values.allFinite()) throw NumericError(name + ": series contains non-finite values");
}

TimeSeries with_splits(TimeSeries series, const Splits& splits) {
  series.splits = splits;
  series.validate();
  return series;
}

TimeSeries apply_transform(TimeSeries series, const Transform& extra) {
  series.transform = series.transform.then(extra);
  series.values = series.values.unaryExpr([&](double v) { return extra.forward(v); });
  return series;
}

// --- Mackey-Glass ----------------------------------------------------------

void MgsParams::validate() const {
  if (!(tau > 0.0)) throw ConfigError("mackey-glass: tau must be positive");
  if (!(integration_step > 0.0)) throw ConfigError("mackey-glass: integration_step must be positive");
  const double ratio = tau / integration_step;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError("mackey-glass: tau / integration_step must be an integer (got " + std::to_string(ratio) + ")");
  }
  if (subsample < 1) throw ConfigError("mackey-glass: subsample must be positive");
  if (std::abs(static_cast<double>(subsample) * integration_step - 1.0) > 1e-9) {
    throw ConfigError("mackey-glass: subsample * integration_step must equal 1");
  }
  if (transient && *transient < 0.0) throw ConfigError("mackey-glass: transient must be nonnegative");
  if (!(history_high >= history_low)) throw ConfigError("mackey-glass: empty history range");
}

TimeSeries generate_mackey_glass(const MgsParams& params, Index total_len, std::uint64_t seed) {
  params.validate();
  if (total_len < 1) throw ConfigError("mackey-glass: total_len must be positive");
  const double h = params.integration_step;
  const auto delay = static_cast<Index>(std::llround(params.tau / h));
  const auto units = static_cast<Index>(std::ceil(params.tau));

  // history knots at integer times -units..0, interpolated onto the grid
  Rng rng = make_rng(seed, 11);
  std::uniform_real_distribution<double> dist(params.history_low, params.history_high);
  std::vector<double> knots(static_cast<std::size_t>(units + 1));
  for (auto& k : knots) k = params.constant_history ? *params.constant_history : dist(rng);
  auto history_at = [&](double t) {  // t in [-units, 0]
    const double pos = t + static_cast<double>(units);
    const auto i = std::min<Index>(static_cast<Index>(std::floor(pos)), units - 1);
    const double frac = pos - static_cast<double>(i);
    if (units == 0) return knots[0];
    return knots[static_cast<std::size_t>(i)] * (1.0 - frac) + knots[static_cast<std::size_t>(i + 1)] * frac;
  };

  // ring buffer holding y at grid steps k-delay .. k
  const Index ring = delay + 1;
  std::vector<double> buffer(static_cast<std::size_t>(ring));
  for (Index j = 0; j <= delay; ++j) {
    buffer[static_cast<std::size_t>(j)] = history_at(-static_cast<double>(delay - j) * h);
  }
  auto rhs = [&](double y, double yd) {
    return params.alpha * yd / (1.0 + std::pow(yd, params.beta)) - params.gamma * y;
  };

  const double transient = params.transient.value_or(10.0 * params.tau);
  const auto discard = static_cast<Index>(std::llround(transient / h));
  const Index last_step = discard + (total_len - 1) * params.subsample;

  TimeSeries out;
  out.name = "mackey-glass";
  out.dt = 1.0;
  out.values.resize(total_len, 1);
  Index head = delay;  // slot of y_k
  double y = buffer[static_cast<std::size_t>(head)];
  Index emitted = 0;
  if (discard == 0) out.values(emitted++, 0) = y;
  for (Index k = 0; k < last_step; ++k) {
    const double delayed = buffer[static_cast<std::size_t>((head + 1) % ring)];  // y_{k-delay}
    const double delayed_next = buffer[static_cast<std::size_t>((head + 2) % ring)];  // y_{k+1-delay}
    double next;
    if (params.integrator == DdeIntegrator::euler) {
      next = y + h * rhs(y, delayed);
    } else {
      const double mid = 0.5 * (delayed + delayed_next);
      const double k1 = rhs(y, delayed);
      const double k2 = rhs(y + 0.5 * h * k1, mid);
      const double k3 = rhs(y + 0.5 * h * k2, mid);
      const double k4 = rhs(y + h * k3, delayed_next);
      next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!std::isfinite(next)) throw NumericError("mackey-glass: integration diverged", k + 1);
    head = (head + 1) % ring;
    buffer[static_cast<std::size_t>(head)] = next;
    y = next;
    const Index step = k + 1;
    if (step >= discard && (step - discard) % params.subsample == 0) out.values(emitted++, 0) = y;
  }
  return out;
}

// --- Lorenz ----------------------------------------------------------------

void LorenzParams::validate() const {
  if (!(step > 0.0)) throw ConfigError("lorenz: step must be positive");
  if (transient_steps < 0) throw ConfigError("lorenz: transient_steps must be nonnegative");
  if (!(scale != 0.0)) throw ConfigError("lorenz: scale must be nonzero");
}

TimeSeries generate_lorenz(const LorenzParams& params, Index total_len) {
  params.validate();
  if (total_len < 1) throw ConfigError("lorenz: total_len must be positive");
  using State = std::array<double, 3>;
  auto deriv = [&](const State& s) -> State {
    return {params.sigma * (s[1] - s[0]), params.r * s[0] - s[1] - s[0] * s[2], s[0] * s[1] - params.b * s[2]};
  };
  auto axpy = [](const State& s, double a, const State& d) -> State {
    return {s[0] + a * d[0], s[1] + a * d[1], s[2] + a * d[2]};
  };
  const double h = params.step;
  State s = params.initial_state;
  auto advance = [&](Index index) {
    const State k1 = deriv(s);
    const State k2 = deriv(axpy(s, 0.5 * h, k1));
    const State k3 = deriv(axpy(s, 0.5 * h, k2));
    const State k4 = deriv(axpy(s, h, k3));
    for (int i = 0; i < 3; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || !std::isfinite(s[2])) {
      throw NumericError("lorenz: non-finite state", index);
    }
  };
  for (Index k = 0; k < params.transient_steps; ++k) advance(k);

  TimeSeries out;
  out.name = "lorenz";
  out.dt = h;
  out.transform = Transform{params.scale, 0.0, false};
  out.values.resize(total_len, 1);
  for (Index t = 0; t < total_len; ++t) {
    if (t > 0) advance(params.transient_steps + t);
    out.values(t, 0) = params.scale * s[0];
  }
  return out;
}

// --- sunspots --------------------------------------------------------------

Splits sunspot_splits(Index length) {
  Splits s{100, 1600, 500, 0};
  s.test = std::max<Index>(0, length - 2200);
  return s;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && !text.empty();
}

}  // namespace

TimeSeries parse_sunspots(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  Index line_no = 0;
  std::vector<double> values;
  std::vector<std::string> missing;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = row.find(';', start);
      fields.push_back(row.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    auto fail = [&](const std::string& why) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 7) fail("expected 7 semicolon-separated fields, found " + std::to_string(fields.size()));
    int year = 0, month = 0, observations = 0, marker = 0;
    double decimal_year = 0, value = 0, deviation = 0;
    if (!parse_number(fields[0], year)) fail("bad year");
    if (!parse_number(fields[1], month) || month < 1 || month > 12) fail("bad month");
    if (!parse_number(fields[2], decimal_year)) fail("bad decimal year");
    if (!parse_number(fields[3], value)) fail("bad monthly mean value");
    if (!parse_number(fields[4], deviation)) fail("bad standard deviation");
    if (!parse_number(fields[5], observations)) fail("bad observation count");
    if (!parse_number(fields[6], marker)) fail("bad provisional marker");
    if (value == -1.0) {
      char date[16];
      std::snprintf(date, sizeof date, "%04d-%02d", year, month);
      missing.emplace_back(date);
    }
    values.push_back(value);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& d : missing) list += (list.empty() ? "" : ", ") + d;
    throw ParseError(source + ": missing monthly values (-1) at " + list);
  }
  if (values.empty()) throw ParseError(source + ": no data rows");

  TimeSeries series;
  series.name = "sunspots";
  series.dt = 1.0;
  series.values = Eigen::Map<const Vector<double>>(values.data(), static_cast<Index>(values.size()));
  series.splits = sunspot_splits(series.length());
  series.validate();  // rejects series shorter than the fixed splits

  const auto training = series.values.middleRows(series.splits.train_begin(), series.splits.train);
  const double lo = training.minCoeff();
  const double hi = training.maxCoeff();
  if (!(hi > lo)) throw ConfigError(source + ": training segment is constant, cannot normalize");
  return apply_transform(std::move(series), Transform{1.0 / (hi - lo), -lo / (hi - lo), false});
}

TimeSeries load_sunspots(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open sunspot file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_sunspots(buffer.str(), path.string());
}

// --- delimited export ------------------------------------------------------

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series, bool original_units) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  const Matrix<double> data = original_units ? series.raw() : series.values;
  out << "index";
  for (Index c = 0; c < data.cols(); ++c) out << (data.cols() == 1 ? ",value" : ",value" + std::to_string(c));
  out << '\n';
  out.precision(17);
  for (Index t = 0; t < data.rows(); ++t) {
    out << t;
    for (Index c = 0; c < data.cols(); ++c) out << ',' << data(t, c);
    out << '\n';
  }
}

TimeSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open series file " + path.string());
  std::string line;
  Index line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    if (line_no == 1 && row.substr(0, 5) == "index") continue;
    std::vector<double> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = row.find(',', start);
      double v = 0;
      const auto field = row.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
      if (!parse_number(field, v)) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + std::string(field) + "'");
      }
      fields.push_back(v);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    if (fields.size() < 2) throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected index,value");
    if (!rows.empty() && fields.size() != rows.front().size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": inconsistent column count");
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw ParseError(path.string() + ": no data rows");
  TimeSeries series;
  series.name = path.stem().string();
  const auto cols = static_cast<Index>(rows.front().size()) - 1;
  series.values.resize(static_cast<Index>(rows.size()), cols);
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (Index c = 0; c < cols; ++c) series.values(static_cast<Index>(t), c) = rows[t][static_cast<std::size_t>(c + 1)];
  series.validate();
  return series;
}

}  // namespace evoesn
