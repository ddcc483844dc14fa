#pragma once

#include <string>

#include "citesim/models.hpp"

namespace citesim::model_json {

// Parses a model description like {"family":"geometric","q":0.5}. Keys
// mirror the parameter records (family, q, a, p, lambda, gamma, u, m, xi);
// omitted keys take the record defaults, unknown keys are rejected. The
// mixing law xi is {"atoms":[[q,weight],...]} or {"s":...,"b":...}.
models::ModelSpec parse_model(const std::string& text);

// Compact JSON echo of a model, suitable for run metadata.
std::string to_json(const models::ModelSpec& model);

}  // namespace citesim::model_json
