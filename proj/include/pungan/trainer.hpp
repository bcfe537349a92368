#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pungan/corpus.hpp"
#include "pungan/discriminator.hpp"
#include "pungan/generator.hpp"

namespace pungan {

// Hyperparameters and schedule. Defaults follow the reference setup: batch
// size 32, learning rate 0.001, sample size 32, 5 generator / 4 discriminator
// pretraining epochs, and a 1:5 generator:discriminator alternation.
struct TrainingConfig {
  std::size_t batch_size = 32;
  double lr = 0.001;
  std::size_t sample_size = 32;  // K sentences per policy-gradient step
  std::size_t gen_pretrain_epochs = 5;
  std::size_t disc_pretrain_epochs = 4;
  std::size_t gen_steps_per_round = 1;
  std::size_t disc_steps_per_round = 5;  // 0 freezes the discriminator (ablation)
  std::size_t adversarial_rounds = 100;
  std::size_t max_len = 20;
  std::size_t emb_dim = 300;
  std::size_t gen_hidden = 128;
  std::size_t disc_hidden = 128;
  std::size_t min_count = 1;
  double init_range = 0.08;
  double grad_clip = 0.0;      // 0 disables clipping
  bool mean_baseline = false;  // optional batch-mean reward baseline
  bool disc_use_unlabeled = true;
  bool disc_use_generated = true;
  std::uint64_t seed = 1;
  std::size_t checkpoint_every = 0;  // 0: only final checkpoints
  std::size_t log_samples = 2;       // decoded sentences kept per round record
  std::size_t eval_samples = 200;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;

  // Flat "key = value" file; '#' starts a comment. Unknown keys are errors.
  static TrainingConfig from_file(const std::string& path);
  void apply_line(const std::string& line, const std::string& where);
};

struct RoundRecord {
  std::size_t round = 0;
  std::string phase;  // pretrain-gen | pretrain-disc | gan
  double gen_loss = 0.0;
  double disc_loss = 0.0;
  double reward_mean = 0.0;
  double reward_min = 0.0;
  double reward_max = 0.0;
  std::vector<std::string> samples;
  double wall_ms = 0.0;  // in-memory only; never serialized, so logs stay reproducible
};

struct TrainingLog {
  std::vector<RoundRecord> records;

  // One JSON object per record; wall-clock excluded by design.
  void write_jsonl(const std::string& path) const;
};

struct TrainingData {
  std::vector<TaggedSentence> labeled;
  std::vector<TaggedSentence> unlabeled;
  std::vector<SensePair> pairs;
  SenseInventory inventory;
  Vocabulary vocab;
};

struct PretrainGenResult {
  GeneratorParams params;
  TrainingLog log;
};

struct PretrainDiscResult {
  DiscriminatorParams params;
  TrainingLog log;
};

// MLE epochs over shuffled batches of the sense-labeled corpus.
PretrainGenResult pretrain_generator(const TrainingConfig& config, const TrainingData& data);

// Epochs of the three-term objective; fake sentences are sampled fresh from
// the (pretrained) generator each batch.
PretrainDiscResult pretrain_discriminator(const TrainingConfig& config, const TrainingData& data,
                                          const GeneratorParams& generator);

// Alternating loop: gen_steps_per_round policy-gradient updates, then
// disc_steps_per_round discriminator updates per round, starting at
// `start_round` (for checkpoint resume). Round r always derives its random
// stream from (seed, r), so a resumed run replays identically. Checkpoints go
// to `out_dir` when set.
TrainingLog adversarial_train(const TrainingConfig& config, const TrainingData& data,
                              GeneratorParams& gen, DiscriminatorParams& disc,
                              const std::optional<std::string>& out_dir = std::nullopt,
                              std::size_t start_round = 0);

// Mean ambiguity reward over `probe_samples` fresh sentences from the
// generator, scored under the discriminator snapshot; used to measure the
// pre-adversarial baseline and post-training levels on one fixed stream.
double mean_reward_probe(const TrainingConfig& config, const TrainingData& data,
                         const GeneratorParams& gen, const DiscriminatorParams& disc,
                         std::uint64_t stream, std::size_t probe_samples);

}  // namespace pungan
