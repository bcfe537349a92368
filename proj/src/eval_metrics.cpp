#include "pungan/eval_metrics.hpp"

#include <set>

#include "pungan/reward.hpp"

namespace pungan {

nlohmann::json MetricReport::to_json() const {
  nlohmann::json j;
  j["unusualness"] = unusualness;
  j["dist1"] = dist1;
  j["dist2"] = dist2;
  j["sentence_count"] = sentence_count;
  if (mean_reward) j["mean_reward"] = *mean_reward;
  return j;
}

double distinct_n(const std::vector<std::vector<std::string>>& sentences, std::size_t n) {
  if (n != 1 && n != 2) throw std::invalid_argument("distinct_n: n must be 1 or 2");
  if (sentences.empty()) throw std::invalid_argument("distinct_n: empty sentence list");
  std::set<std::vector<std::string>> distinct;
  std::size_t total = 0;
  for (const auto& sentence : sentences) {
    if (sentence.size() < n) continue;
    for (std::size_t i = 0; i + n <= sentence.size(); ++i) {
      distinct.insert(std::vector<std::string>(sentence.begin() + static_cast<long>(i),
                                               sentence.begin() + static_cast<long>(i + n)));
      ++total;
    }
  }
  if (total == 0) {
    throw std::domain_error("distinct_n: no sentence is long enough for n = " +
                            std::to_string(n));
  }
  return 100.0 * static_cast<double>(distinct.size()) / static_cast<double>(total);
}

namespace {

double mean_per_token_logprob(const GeneratorParams& lm,
                              const std::vector<std::vector<int>>& corpus) {
  double total_logprob = 0.0;
  std::size_t total_tokens = 0;
  for (const auto& tokens : corpus) {
    total_logprob += lm_logprob(lm, tokens);
    total_tokens += tokens.size() + 1;  // the <eos> step is a prediction too
  }
  return total_logprob / static_cast<double>(total_tokens);
}

}  // namespace

double unusualness(const GeneratorParams& lm, const std::vector<std::vector<int>>& generated,
                   const std::vector<std::vector<int>>& training_sample) {
  if (generated.empty() || training_sample.empty()) {
    throw std::invalid_argument("unusualness: both corpora must be non-empty");
  }
  return mean_per_token_logprob(lm, generated) - mean_per_token_logprob(lm, training_sample);
}

MetricReport evaluate_run(const GeneratorParams& gen, const DiscriminatorParams* disc,
                          const std::vector<SensePair>& pairs,
                          const std::vector<TaggedSentence>& training_sample,
                          const SenseInventory& inventory, const Vocabulary& vocab,
                          const EvalConfig& config) {
  if (pairs.empty()) throw std::invalid_argument("evaluate_run: empty pair list");
  if (config.sample_count == 0) throw std::invalid_argument("evaluate_run: sample_count is zero");
  if (training_sample.empty()) {
    throw std::invalid_argument("evaluate_run: empty training sample");
  }
  const Rng master(config.seed);

  std::vector<std::vector<int>> generated_ids;
  std::vector<std::vector<std::string>> generated_text;
  double reward_sum = 0.0;
  for (std::size_t i = 0; i < config.sample_count; ++i) {
    const SensePair& pair = pairs[i % pairs.size()];
    Rng rng = master.derive(i);
    GenerationTrace trace = sample_sentence(gen, pair, inventory, vocab, rng, config.max_len);
    std::vector<int> surface;
    surface.reserve(trace.tokens.size());
    for (int id : trace.tokens) surface.push_back(vocab.surface_id(id));
    generated_text.push_back(vocab.decode_all(surface));
    generated_ids.push_back(std::move(surface));
    if (disc) {
      const auto [p1, p2] =
          sense_pair_probs(*disc, trace_as_sentence(trace), pair, inventory, vocab);
      reward_sum += ambiguity_reward(p1, p2);
    }
  }

  std::vector<std::vector<int>> training_ids;
  training_ids.reserve(training_sample.size());
  for (const auto& s : training_sample) {
    std::vector<int> surface;
    surface.reserve(s.tokens.size());
    for (int id : s.tokens) surface.push_back(vocab.surface_id(id));
    training_ids.push_back(std::move(surface));
  }

  MetricReport report;
  report.sentence_count = generated_ids.size();
  report.unusualness = unusualness(gen, generated_ids, training_ids);
  report.dist1 = distinct_n(generated_text, 1);
  report.dist2 = distinct_n(generated_text, 2);
  if (disc) report.mean_reward = reward_sum / static_cast<double>(config.sample_count);
  return report;
}

}  // namespace pungan
