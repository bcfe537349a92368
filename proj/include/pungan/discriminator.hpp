#pragma once

#include <map>
#include <string>
#include <vector>

#include "pungan/corpus.hpp"
#include "pungan/generator.hpp"
#include "pungan/lstm.hpp"
#include "pungan/matrix.hpp"
#include "pungan/rng.hpp"

namespace pungan {

// Output head for one lemma: k_w real senses plus the trailing "generated"
// class, read off the bi-LSTM context vector at the target position.
struct LemmaHead {
  std::vector<std::string> senses;  // inventory order
  Matrix u;                         // (k_w + 1) x (2 * hidden)
  Matrix b;                         // (k_w + 1) x 1
};

// Semi-supervised word-sense classifier: shared bi-LSTM encoder, one head per
// inventory lemma. The embedding table is separate from the generator's.
struct DiscriminatorParams {
  std::size_t vocab = 0;
  std::size_t emb_dim = 0;
  std::size_t hidden = 0;

  Matrix embedding;
  LstmCellParams fwd;
  LstmCellParams bwd;
  std::map<std::string, LemmaHead> heads;

  static DiscriminatorParams init(std::size_t vocab, std::size_t emb_dim, std::size_t hidden,
                                  const SenseInventory& inventory, Rng& rng, double range = 0.08);

  const LemmaHead& head(const std::string& lemma) const;

  // Encoder parameters plus every head, heads in lemma order.
  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;

  void save(const std::string& path) const;
  static DiscriminatorParams load(const std::string& path);
};

// D(y | x) over a lemma's k_w + 1 classes, senses in inventory order followed
// by the generated class.
struct SenseDistribution {
  std::string lemma;
  std::vector<double> probabilities;

  double generated() const { return probabilities.back(); }
};

// Softmax(U_w c + b_w) where c concatenates the forward and backward encoder
// states at the target position. The sentence is consumed in surface form:
// sense-tagged ids are mapped back to their lemma token.
SenseDistribution classify(const DiscriminatorParams& params, const TaggedSentence& sentence,
                           const Vocabulary& vocab);

// The two coordinates of classify() selected by the pair, in pair order.
std::pair<double, double> sense_pair_probs(const DiscriminatorParams& params,
                                           const TaggedSentence& sentence, const SensePair& pair,
                                           const SenseInventory& inventory,
                                           const Vocabulary& vocab);

// Three-term semi-supervised objective, each term averaged within its batch:
//   labeled:   -log p(y = label | x)
//   unlabeled: -log p(y < k+1 | x)
//   generated: -log p(y = k+1 | x)
// Any batch may be empty, dropping its term.
double discriminator_loss(const DiscriminatorParams& params,
                          const std::vector<TaggedSentence>& labeled,
                          const std::vector<TaggedSentence>& unlabeled,
                          const std::vector<TaggedSentence>& generated, const Vocabulary& vocab);

// One SGD step on the loss above; returns the loss before the step.
double discriminator_train_step(DiscriminatorParams& params,
                                const std::vector<TaggedSentence>& labeled,
                                const std::vector<TaggedSentence>& unlabeled,
                                const std::vector<TaggedSentence>& generated,
                                const Vocabulary& vocab, double lr, double grad_clip = 0.0);

// View of a generated trace as discriminator input.
TaggedSentence trace_as_sentence(const GenerationTrace& trace);

}  // namespace pungan
