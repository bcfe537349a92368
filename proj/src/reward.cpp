#include "pungan/reward.hpp"

#include <cmath>
#include <string>

namespace pungan {

double ambiguity_reward(double p1, double p2) {
  constexpr double kSlack = 1e-9;
  if (p1 < -kSlack || p2 < -kSlack || p1 > 1.0 + kSlack || p2 > 1.0 + kSlack ||
      p1 + p2 > 1.0 + kSlack) {
    throw std::invalid_argument("ambiguity_reward: (" + std::to_string(p1) + ", " +
                                std::to_string(p2) + ") is not a valid probability pair");
  }
  return (p1 + p2) / (std::fabs(p1 - p2) + 1.0);
}

SampleBatch batch_rewards(const DiscriminatorParams& disc, std::vector<GenerationTrace> traces,
                          const SensePair& pair, const SenseInventory& inventory,
                          const Vocabulary& vocab, std::vector<RewardRecord>* records) {
  SampleBatch batch;
  batch.traces = std::move(traces);
  batch.rewards.reserve(batch.traces.size());
  for (std::size_t k = 0; k < batch.traces.size(); ++k) {
    const GenerationTrace& trace = batch.traces[k];
    if (trace.pair.lemma != pair.lemma) {
      throw std::invalid_argument("batch_rewards: sample lemma '" + trace.pair.lemma +
                                  "' does not match pair lemma '" + pair.lemma + "'");
    }
    const auto [p1, p2] =
        sense_pair_probs(disc, trace_as_sentence(trace), pair, inventory, vocab);
    const double r = ambiguity_reward(p1, p2);
    batch.rewards.push_back(r);
    if (records) records->push_back({k, p1, p2, r});
  }
  return batch;
}

}  // namespace pungan
