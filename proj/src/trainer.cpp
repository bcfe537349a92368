#include "pungan/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pungan/reward.hpp"

namespace pungan {

namespace {

// Stream ids for Rng::derive; spacing keeps per-epoch and per-round streams
// from colliding.
constexpr std::uint64_t kGenInitStream = 1;
constexpr std::uint64_t kDiscInitStream = 2;
constexpr std::uint64_t kGenEpochBase = 1000;
constexpr std::uint64_t kDiscEpochBase = 2000;
constexpr std::uint64_t kRoundBase = 1u << 20;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string decode_sentence(const std::vector<int>& tokens, const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += vocab.decode(vocab.surface_id(tokens[i]));
  }
  return out;
}

std::vector<TaggedSentence> draw_batch(const std::vector<TaggedSentence>& pool,
                                       std::size_t batch_size, Rng& rng) {
  std::vector<TaggedSentence> out;
  out.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    out.push_back(pool[rng.uniform_index(pool.size())]);
  }
  return out;
}

std::vector<TaggedSentence> sample_fakes(const TrainingConfig& config, const TrainingData& data,
                                         const GeneratorParams& gen, std::size_t count, Rng& rng) {
  std::vector<TaggedSentence> fakes;
  fakes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const SensePair& pair = data.pairs[rng.uniform_index(data.pairs.size())];
    GenerationTrace trace =
        sample_sentence(gen, pair, data.inventory, data.vocab, rng, config.max_len);
    fakes.push_back(trace_as_sentence(trace));
  }
  return fakes;
}

}  // namespace

void TrainingConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v < 1) throw std::invalid_argument(std::string("config: ") + name + " must be >= 1");
  };
  positive(batch_size, "batch_size");
  positive(sample_size, "sample_size");
  positive(gen_pretrain_epochs, "gen_pretrain_epochs");
  positive(disc_pretrain_epochs, "disc_pretrain_epochs");
  positive(gen_steps_per_round, "gen_steps_per_round");
  positive(adversarial_rounds, "adversarial_rounds");
  positive(max_len, "max_len");
  positive(emb_dim, "emb_dim");
  positive(gen_hidden, "gen_hidden");
  positive(disc_hidden, "disc_hidden");
  if (!(lr > 0.0)) throw std::invalid_argument("config: lr must be > 0");
  if (!(init_range > 0.0)) throw std::invalid_argument("config: init_range must be > 0");
  if (grad_clip < 0.0) throw std::invalid_argument("config: grad_clip must be >= 0");
}

void TrainingConfig::apply_line(const std::string& line, const std::string& where) {
  std::string stripped = line.substr(0, line.find('#'));
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!stripped.empty() && is_space(stripped.back())) stripped.pop_back();
  std::size_t start = 0;
  while (start < stripped.size() && is_space(stripped[start])) ++start;
  stripped = stripped.substr(start);
  if (stripped.empty()) return;

  const auto eq = stripped.find('=');
  if (eq == std::string::npos) throw ParseError(where + ": expected 'key = value'");
  auto trim = [&](std::string s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
  };
  const std::string key = trim(stripped.substr(0, eq));
  const std::string value = trim(stripped.substr(eq + 1));
  if (key.empty() || value.empty()) throw ParseError(where + ": expected 'key = value'");

  auto as_count = [&]() -> std::size_t {
    try {
      return static_cast<std::size_t>(std::stoull(value));
    } catch (...) {
      throw ParseError(where + ": '" + value + "' is not a count");
    }
  };
  auto as_real = [&]() -> double {
    try {
      return std::stod(value);
    } catch (...) {
      throw ParseError(where + ": '" + value + "' is not a number");
    }
  };
  auto as_bool = [&]() -> bool {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw ParseError(where + ": '" + value + "' is not a boolean");
  };

  if (key == "batch_size") batch_size = as_count();
  else if (key == "lr") lr = as_real();
  else if (key == "sample_size") sample_size = as_count();
  else if (key == "gen_pretrain_epochs") gen_pretrain_epochs = as_count();
  else if (key == "disc_pretrain_epochs") disc_pretrain_epochs = as_count();
  else if (key == "gen_steps_per_round") gen_steps_per_round = as_count();
  else if (key == "disc_steps_per_round") disc_steps_per_round = as_count();
  else if (key == "adversarial_rounds") adversarial_rounds = as_count();
  else if (key == "max_len") max_len = as_count();
  else if (key == "emb_dim") emb_dim = as_count();
  else if (key == "gen_hidden") gen_hidden = as_count();
  else if (key == "disc_hidden") disc_hidden = as_count();
  else if (key == "min_count") min_count = as_count();
  else if (key == "init_range") init_range = as_real();
  else if (key == "grad_clip") grad_clip = as_real();
  else if (key == "mean_baseline") mean_baseline = as_bool();
  else if (key == "disc_use_unlabeled") disc_use_unlabeled = as_bool();
  else if (key == "disc_use_generated") disc_use_generated = as_bool();
  else if (key == "seed") {
    try {
      seed = static_cast<std::uint64_t>(std::stoull(value));
    } catch (...) {
      throw ParseError(where + ": '" + value + "' is not a seed");
    }
  }
  else if (key == "checkpoint_every") checkpoint_every = as_count();
  else if (key == "log_samples") log_samples = as_count();
  else if (key == "eval_samples") eval_samples = as_count();
  else throw ParseError(where + ": unknown config key '" + key + "'");
}

TrainingConfig TrainingConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config: " + path);
  TrainingConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    config.apply_line(line, path + ":" + std::to_string(line_no));
  }
  config.validate();
  return config;
}

void TrainingLog::write_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write log: " + path);
  for (const auto& r : records) {
    nlohmann::json j;
    j["round"] = r.round;
    j["phase"] = r.phase;
    j["gen_loss"] = r.gen_loss;
    j["disc_loss"] = r.disc_loss;
    j["reward_mean"] = r.reward_mean;
    j["reward_min"] = r.reward_min;
    j["reward_max"] = r.reward_max;
    j["samples"] = r.samples;
    out << j.dump() << "\n";
  }
}

PretrainGenResult pretrain_generator(const TrainingConfig& config, const TrainingData& data) {
  config.validate();
  if (data.labeled.empty()) {
    throw std::invalid_argument("pretrain_generator: empty labeled corpus");
  }
  const Rng master(config.seed);
  Rng init_rng = master.derive(kGenInitStream);
  PretrainGenResult result{
      GeneratorParams::init(data.vocab.size(), config.emb_dim, config.gen_hidden, config.max_len,
                            init_rng, config.init_range),
      {}};
  for (std::size_t epoch = 0; epoch < config.gen_pretrain_epochs; ++epoch) {
    const double t0 = now_ms();
    auto batches =
        batch_iter(data.labeled.size(), config.batch_size, master.derive(kGenEpochBase + epoch));
    double loss_sum = 0.0;
    for (const auto& batch_idx : batches) {
      std::vector<TaggedSentence> batch;
      batch.reserve(batch_idx.size());
      for (std::size_t i : batch_idx) batch.push_back(data.labeled[i]);
      loss_sum += mle_pretrain_step(result.params, batch, data.vocab, config.lr, config.grad_clip);
    }
    RoundRecord rec;
    rec.round = epoch;
    rec.phase = "pretrain-gen";
    rec.gen_loss = loss_sum / static_cast<double>(batches.size());
    rec.wall_ms = now_ms() - t0;
    result.log.records.push_back(std::move(rec));
  }
  return result;
}

PretrainDiscResult pretrain_discriminator(const TrainingConfig& config, const TrainingData& data,
                                          const GeneratorParams& generator) {
  config.validate();
  if (data.labeled.empty()) {
    throw std::invalid_argument("pretrain_discriminator: empty labeled corpus");
  }
  if (config.disc_use_generated && data.pairs.empty()) {
    throw std::invalid_argument("pretrain_discriminator: generated term enabled but no pairs");
  }
  const Rng master(config.seed);
  Rng init_rng = master.derive(kDiscInitStream);
  PretrainDiscResult result{
      DiscriminatorParams::init(data.vocab.size(), config.emb_dim, config.disc_hidden,
                                data.inventory, init_rng, config.init_range),
      {}};
  for (std::size_t epoch = 0; epoch < config.disc_pretrain_epochs; ++epoch) {
    const double t0 = now_ms();
    Rng epoch_rng = master.derive(kDiscEpochBase + epoch);
    auto batches = batch_iter(data.labeled.size(), config.batch_size, epoch_rng.derive(0));
    double loss_sum = 0.0;
    for (const auto& batch_idx : batches) {
      std::vector<TaggedSentence> labeled;
      labeled.reserve(batch_idx.size());
      for (std::size_t i : batch_idx) labeled.push_back(data.labeled[i]);
      std::vector<TaggedSentence> unlabeled;
      if (config.disc_use_unlabeled && !data.unlabeled.empty()) {
        unlabeled = draw_batch(data.unlabeled, batch_idx.size(), epoch_rng);
      }
      std::vector<TaggedSentence> generated;
      if (config.disc_use_generated) {
        generated = sample_fakes(config, data, generator, batch_idx.size(), epoch_rng);
      }
      loss_sum += discriminator_train_step(result.params, labeled, unlabeled, generated,
                                           data.vocab, config.lr, config.grad_clip);
    }
    RoundRecord rec;
    rec.round = epoch;
    rec.phase = "pretrain-disc";
    rec.disc_loss = loss_sum / static_cast<double>(batches.size());
    rec.wall_ms = now_ms() - t0;
    result.log.records.push_back(std::move(rec));
  }
  return result;
}

TrainingLog adversarial_train(const TrainingConfig& config, const TrainingData& data,
                              GeneratorParams& gen, DiscriminatorParams& disc,
                              const std::optional<std::string>& out_dir,
                              std::size_t start_round) {
  config.validate();
  if (data.pairs.empty()) throw std::invalid_argument("adversarial_train: empty sense-pair list");
  if (data.labeled.empty()) throw std::invalid_argument("adversarial_train: empty labeled corpus");
  const Rng master(config.seed);
  TrainingLog log;

  for (std::size_t round = start_round; round < config.adversarial_rounds; ++round) {
    const double t0 = now_ms();
    Rng rng = master.derive(kRoundBase + round);
    RoundRecord rec;
    rec.round = round;
    rec.phase = "gan";

    // Generator phase.
    double gen_loss_sum = 0.0;
    std::vector<double> rewards;
    for (std::size_t g = 0; g < config.gen_steps_per_round; ++g) {
      const SensePair& pair = data.pairs[rng.uniform_index(data.pairs.size())];
      std::vector<GenerationTrace> traces;
      traces.reserve(config.sample_size);
      for (std::size_t k = 0; k < config.sample_size; ++k) {
        traces.push_back(
            sample_sentence(gen, pair, data.inventory, data.vocab, rng, config.max_len));
      }
      SampleBatch batch =
          batch_rewards(disc, std::move(traces), pair, data.inventory, data.vocab);
      rewards.insert(rewards.end(), batch.rewards.begin(), batch.rewards.end());
      if (rec.samples.size() < config.log_samples) {
        for (std::size_t k = 0; k < batch.traces.size() && rec.samples.size() < config.log_samples;
             ++k) {
          rec.samples.push_back(decode_sentence(batch.traces[k].tokens, data.vocab));
        }
      }
      gen_loss_sum += policy_gradient_step(gen, batch, data.inventory, data.vocab, config.lr,
                                           config.mean_baseline, config.grad_clip);
    }
    rec.gen_loss = gen_loss_sum / static_cast<double>(config.gen_steps_per_round);

    // Discriminator phase; skipped entirely in the frozen ablation.
    double disc_loss_sum = 0.0;
    for (std::size_t d = 0; d < config.disc_steps_per_round; ++d) {
      std::vector<TaggedSentence> labeled = draw_batch(data.labeled, config.batch_size, rng);
      std::vector<TaggedSentence> unlabeled;
      if (config.disc_use_unlabeled && !data.unlabeled.empty()) {
        unlabeled = draw_batch(data.unlabeled, config.batch_size, rng);
      }
      std::vector<TaggedSentence> generated;
      if (config.disc_use_generated) {
        generated = sample_fakes(config, data, gen, config.batch_size, rng);
      }
      disc_loss_sum += discriminator_train_step(disc, labeled, unlabeled, generated, data.vocab,
                                                config.lr, config.grad_clip);
    }
    rec.disc_loss = config.disc_steps_per_round == 0
                        ? 0.0
                        : disc_loss_sum / static_cast<double>(config.disc_steps_per_round);

    rec.reward_mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) /
                      static_cast<double>(rewards.size());
    rec.reward_min = *std::min_element(rewards.begin(), rewards.end());
    rec.reward_max = *std::max_element(rewards.begin(), rewards.end());
    rec.wall_ms = now_ms() - t0;
    log.records.push_back(std::move(rec));

    if (out_dir && config.checkpoint_every > 0 &&
        (round + 1) % config.checkpoint_every == 0) {
      gen.save(*out_dir + "/generator_round_" + std::to_string(round + 1) + ".json");
      disc.save(*out_dir + "/discriminator_round_" + std::to_string(round + 1) + ".json");
    }
  }
  return log;
}

double mean_reward_probe(const TrainingConfig& config, const TrainingData& data,
                         const GeneratorParams& gen, const DiscriminatorParams& disc,
                         std::uint64_t stream, std::size_t probe_samples) {
  if (data.pairs.empty()) throw std::invalid_argument("mean_reward_probe: empty sense-pair list");
  if (probe_samples == 0) throw std::invalid_argument("mean_reward_probe: zero samples");
  Rng rng = Rng(config.seed).derive(stream);
  double sum = 0.0;
  for (std::size_t k = 0; k < probe_samples; ++k) {
    const SensePair& pair = data.pairs[rng.uniform_index(data.pairs.size())];
    GenerationTrace trace =
        sample_sentence(gen, pair, data.inventory, data.vocab, rng, config.max_len);
    SampleBatch batch = batch_rewards(disc, {std::move(trace)}, pair, data.inventory, data.vocab);
    sum += batch.rewards[0];
  }
  return sum / static_cast<double>(probe_samples);
}

}  // namespace pungan
