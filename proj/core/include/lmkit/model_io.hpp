#pragma once

#include <string>

#include "lmkit/infer.hpp"

namespace lmkit {

// Persists a fitted model as a versioned JSON document: the model formula
// (in its typed spelling), the encoding state, coefficients, the unscaled
// covariance factor, and the sums of squares and degrees of freedom needed
// for prediction and nested-model tests. Training data is not stored.
// Writes are atomic (temp file + rename).
void save_model(const FitResult& f, const std::string& path);

// Reconstructs a FitResult without training data attached.
FitResult load_model(const std::string& path);

// Atomically writes content to path.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace lmkit
