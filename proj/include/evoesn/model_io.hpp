#pragma once

// JSON persistence of trained models.

#include "evoesn/esn.hpp"

#include <filesystem>
#include <string>

namespace evoesn {

inline constexpr int kModelFormatVersion = 1;

/// Document with hyperparameters, seed, layout positions, W_in, the
/// reservoir values in layout order, W_fb and W_out. Doubles are written
/// with full round-trip precision.
std::string model_to_json(const EsnModel<double>& model);
EsnModel<double> model_from_json(const std::string& text);

void save_model(const EsnModel<double>& model, const std::filesystem::path& path);
/// Throws LoadError on unreadable or malformed files.
EsnModel<double> load_model(const std::filesystem::path& path);

}  // namespace evoesn
