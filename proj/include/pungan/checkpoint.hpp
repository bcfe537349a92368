#pragma once

#include <string>

#include <json.hpp>

#include "pungan/matrix.hpp"

namespace pungan {

// Shared container format for model checkpoints. Values are stored as JSON
// numbers; nlohmann's serializer emits shortest round-trip decimals, so a
// save/load cycle reproduces every double bit-exactly.
inline constexpr const char* kCheckpointFormat = "pungan-checkpoint";
inline constexpr int kCheckpointVersion = 1;

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);

// Wraps `payload` with format/version/model headers and writes it.
void write_checkpoint(const std::string& path, const std::string& model_type,
                      nlohmann::json payload);

// Reads and unwraps; throws ValidationError on a format/version/model mismatch.
nlohmann::json read_checkpoint(const std::string& path, const std::string& expected_model_type);

}  // namespace pungan
