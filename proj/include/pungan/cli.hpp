#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace pungan {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by every subcommand. CLI11 itself returns 1 for
// flag/usage errors.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;    // malformed or inconsistent inputs
inline constexpr int kExitPrerequisite = 3;  // missing prepared data / checkpoints
inline constexpr int kExitRuntime = 4;       // anything else

struct PrepareDataArgs {
  std::string inventory_path;
  std::string labeled_path;
  std::optional<std::string> unlabeled_path;
  std::optional<std::string> pairs_path;
  std::string out_dir;
  std::size_t min_count = 1;
  std::size_t max_len = 20;
};

struct TrainArgs {
  std::string data_dir;
  std::string out_dir;
  std::optional<std::string> config_path;
  std::string mode;  // pretrain-gen | pretrain-disc | gan | gan-frozen-disc
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> resume_round;
};

struct GenerateArgs {
  std::string data_dir;
  std::string checkpoint_path;
  std::string pairs_path;
  std::size_t count = 10;
  std::string decode = "sample";  // sample | greedy
  std::uint64_t seed = 1;
  std::optional<std::string> out_path;  // stdout when absent
};

struct EvaluateArgs {
  std::string data_dir;
  std::string checkpoint_path;
  std::string pairs_path;
  std::string training_sample_path;
  std::optional<std::string> disc_checkpoint_path;
  std::size_t count = 200;
  std::uint64_t seed = 1;
  bool self_comparison = false;  // score the training sample against itself
  std::optional<std::string> out_path;
};

int run_prepare_data(const PrepareDataArgs& args);
int run_train(const TrainArgs& args);
int run_generate(const GenerateArgs& args);
int run_evaluate(const EvaluateArgs& args);

// FNV-1a 64-bit digest of a file's bytes, hex-encoded; used by run manifests
// to pin inputs (not a cryptographic hash).
std::string file_digest(const std::string& path);

}  // namespace pungan
