#pragma once

#include <vector>

#include "pungan/discriminator.hpp"
#include "pungan/generator.hpp"

namespace pungan {

// One sample's discriminator readings and its ambiguity reward.
struct RewardRecord {
  std::size_t sample_index = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  double reward = 0.0;
};

// (p1 + p2) / (|p1 - p2| + 1): large when both senses carry mass and the gap
// between them is small; lies in [0, 1] for valid inputs.
double ambiguity_reward(double p1, double p2);

// Classifies each trace under the discriminator snapshot, extracts the pair's
// two sense probabilities, and attaches the rewards as constants.
SampleBatch batch_rewards(const DiscriminatorParams& disc, std::vector<GenerationTrace> traces,
                          const SensePair& pair, const SenseInventory& inventory,
                          const Vocabulary& vocab, std::vector<RewardRecord>* records = nullptr);

}  // namespace pungan
