#pragma once

#include <span>
#include <string>

#include "curvegnn/autodiff/tape.hpp"

namespace curvegnn::ad {

// Checkpoint file: JSON object
//   {"format": "curvegnn-checkpoint", "version": 1,
//    "parameters": [{"name": str, "shape": [rows, cols], "data": [row-major values]}, ...]}
// Values are written with round-trip precision.

void save_checkpoint(const std::string& path, std::span<const Parameter* const> params);
/// Loads into params by name; every parameter must be present with a matching shape.
void load_checkpoint(const std::string& path, std::span<Parameter* const> params);

}  // namespace curvegnn::ad
