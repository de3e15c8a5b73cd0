#pragma once

#include <string>

#include "ssgl_gam/em_fit.hpp"

namespace ssgl_gam {

inline constexpr int kModelFormatVersion = 1;

/// JSON text of a fitted model. Doubles are written in shortest round-trip
/// form, so load(save(m)) reproduces every coefficient exactly.
std::string model_to_json(const SbGamFit& fit);
SbGamFit model_from_json(const std::string& text, const std::string& source = "<model>");

void save_model(const SbGamFit& fit, const std::string& path);
SbGamFit load_model(const std::string& path);

}  // namespace ssgl_gam
