#include "evoesn/model_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace evoesn {

using nlohmann::json;

namespace {

json matrix_json(const Matrix<double>& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix<double> matrix_from(const json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const json& data = j.at("data");
  if (static_cast<Index>(data.size()) != rows) throw LoadError("matrix row count mismatch");
  Matrix<double> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = data.at(static_cast<std::size_t>(r));
    if (static_cast<Index>(row.size()) != cols) throw LoadError("matrix column count mismatch");
    for (Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json hyper_json(const EsnHyperparameters& h) {
  json j{{"units", h.units},
         {"density", h.density},
         {"reservoir_range", h.reservoir_range},
         {"input_scaling", h.input_scaling},
         {"feedback_scaling", h.feedback_scaling},
         {"outputs", h.outputs},
         {"autoregressive", h.autoregressive},
         {"feedback", h.feedback},
         {"leak_rate", h.leak_rate},
         {"noise_scale", h.noise_scale},
         {"input_bias", h.input_bias},
         {"activation", to_string(h.activation)},
         {"readout", to_string(h.readout)}};
  j["spectral_radius"] = h.spectral_radius ? json(*h.spectral_radius) : json(nullptr);
  return j;
}

EsnHyperparameters hyper_from(const json& j) {
  EsnHyperparameters h;
  h.units = j.at("units").get<Index>();
  h.density = j.at("density").get<double>();
  h.reservoir_range = j.at("reservoir_range").get<double>();
  h.input_scaling = j.at("input_scaling").get<double>();
  h.feedback_scaling = j.at("feedback_scaling").get<double>();
  h.outputs = j.at("outputs").get<Index>();
  h.autoregressive = j.at("autoregressive").get<bool>();
  h.feedback = j.at("feedback").get<bool>();
  h.leak_rate = j.at("leak_rate").get<double>();
  h.noise_scale = j.at("noise_scale").get<double>();
  h.input_bias = j.at("input_bias").get<double>();
  h.activation = parse_activation(j.at("activation").get<std::string>());
  h.readout = parse_activation(j.at("readout").get<std::string>());
  if (j.at("spectral_radius").is_null()) h.spectral_radius.reset();
  else h.spectral_radius = j.at("spectral_radius").get<double>();
  return h;
}

}  // namespace

std::string model_to_json(const EsnModel<double>& model) {
  json positions = json::array();
  for (const auto& [r, c] : model.layout.positions()) positions.push_back({r, c});
  const Vector<double> values = values_from_reservoir(model.reservoir, model.layout);
  json doc{{"format", "evoesn-model"},
           {"version", kModelFormatVersion},
           {"seed", model.seed},
           {"hyperparameters", hyper_json(model.hyper)},
           {"positions", std::move(positions)},
           {"input_weights", matrix_json(model.input_weights)},
           {"reservoir_values", std::vector<double>(values.data(), values.data() + values.size())}};
  doc["feedback_weights"] = model.feedback_weights ? matrix_json(*model.feedback_weights) : json(nullptr);
  doc["readout"] = model.readout ? matrix_json(*model.readout) : json(nullptr);
  return doc.dump(1);
}

EsnModel<double> model_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != "evoesn-model") throw LoadError("not an evoesn model document");
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw LoadError("unsupported model format version " + std::to_string(doc.at("version").get<int>()));
    }
    EsnHyperparameters hyper = hyper_from(doc.at("hyperparameters"));
    std::vector<std::pair<Index, Index>> positions;
    for (const auto& p : doc.at("positions")) positions.emplace_back(p.at(0).get<Index>(), p.at(1).get<Index>());
    ReservoirLayout layout(hyper.units, std::move(positions));
    const auto values = doc.at("reservoir_values").get<std::vector<double>>();
    if (static_cast<Index>(values.size()) != layout.size()) throw LoadError("reservoir value count mismatch");
    EsnModel<double> model{layout, hyper, doc.at("seed").get<std::uint64_t>(), matrix_from(doc.at("input_weights")),
                           reservoir_from_values(layout, Eigen::Map<const Vector<double>>(values.data(), layout.size())),
                           std::nullopt, std::nullopt};
    if (!doc.at("feedback_weights").is_null()) model.feedback_weights = matrix_from(doc.at("feedback_weights"));
    if (!doc.at("readout").is_null()) model.readout = matrix_from(doc.at("readout"));
    if (model.input_weights.rows() != hyper.units || model.input_weights.cols() != hyper.input_dim()) {
      throw LoadError("input weight shape does not match the hyperparameters");
    }
    if (model.readout && (model.readout->rows() != hyper.outputs ||
                          model.readout->cols() != hyper.input_dim() + hyper.units)) {
      throw LoadError("readout shape does not match the hyperparameters");
    }
    return model;
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed model document: ") + e.what());
  } catch (const LayoutError& e) {
    throw LoadError(std::string("invalid layout in model document: ") + e.what());
  }
}

void save_model(const EsnModel<double>& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write model " + path.string());
  out << model_to_json(model) << '\n';
}

EsnModel<double> load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open model " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace evoesn
