#include "pungan/checkpoint.hpp"

#include <fstream>

#include "pungan/errors.hpp"

namespace pungan {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json j;
  j["rows"] = m.rows;
  j["cols"] = m.cols;
  j["data"] = m.data;
  return j;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
    throw ValidationError("checkpoint: malformed matrix entry for " + what);
  }
  Matrix m;
  m.rows = j["rows"].get<std::size_t>();
  m.cols = j["cols"].get<std::size_t>();
  m.data = j["data"].get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols) {
    throw ValidationError("checkpoint: matrix data length mismatch for " + what);
  }
  return m;
}

void write_checkpoint(const std::string& path, const std::string& model_type,
                      nlohmann::json payload) {
  nlohmann::json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["model"] = model_type;
  j["payload"] = std::move(payload);
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write checkpoint: " + path);
  out << j.dump() << "\n";
}

nlohmann::json read_checkpoint(const std::string& path, const std::string& expected_model_type) {
  std::ifstream in(path);
  if (!in) throw PrerequisiteError("checkpoint not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("checkpoint " + path + ": invalid JSON: " + e.what());
  }
  if (j.value("format", "") != kCheckpointFormat) {
    throw ValidationError("checkpoint " + path + ": unrecognized format");
  }
  if (j.value("version", -1) != kCheckpointVersion) {
    throw ValidationError("checkpoint " + path + ": unsupported version");
  }
  if (j.value("model", "") != expected_model_type) {
    throw ValidationError("checkpoint " + path + ": model type '" + j.value("model", "") +
                          "', expected '" + expected_model_type + "'");
  }
  return j["payload"];
}

}  // namespace pungan
