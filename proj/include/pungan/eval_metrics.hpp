#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pungan/discriminator.hpp"
#include "pungan/generator.hpp"

namespace pungan {

struct MetricReport {
  double unusualness = 0.0;  // nats per token
  double dist1 = 0.0;        // percent
  double dist2 = 0.0;        // percent
  std::size_t sentence_count = 0;
  std::optional<double> mean_reward;  // present when a discriminator was supplied

  nlohmann::json to_json() const;
};

// 100 * distinct n-grams / total n-grams, pooled over the whole corpus.
// n must be 1 or 2; sentences shorter than n contribute no n-grams. Throws
// std::invalid_argument on an empty corpus and std::domain_error when no
// sentence yields an n-gram.
double distinct_n(const std::vector<std::vector<std::string>>& sentences, std::size_t n);

// Mean per-token log-probability of `generated` minus that of
// `training_sample`, both scored by the forward model in single-sense mode.
// Token sequences are surface ids; the <eos> prediction counts as a token.
double unusualness(const GeneratorParams& lm, const std::vector<std::vector<int>>& generated,
                   const std::vector<std::vector<int>>& training_sample);

struct EvalConfig {
  std::size_t sample_count = 200;
  std::uint64_t seed = 1;
  std::size_t max_len = 20;
};

// Samples sentences round-robin over the pair list, then computes the
// metrics against the supplied training sample. `disc` may be null; when
// given, the report also carries the mean ambiguity reward of the samples.
MetricReport evaluate_run(const GeneratorParams& gen, const DiscriminatorParams* disc,
                          const std::vector<SensePair>& pairs,
                          const std::vector<TaggedSentence>& training_sample,
                          const SenseInventory& inventory, const Vocabulary& vocab,
                          const EvalConfig& config);

}  // namespace pungan
