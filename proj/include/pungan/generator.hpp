#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pungan/corpus.hpp"
#include "pungan/lstm.hpp"
#include "pungan/matrix.hpp"
#include "pungan/rng.hpp"
#include "pungan/tape.hpp"

namespace pungan {

// Dual-sense constrained language model. One embedding table and one output
// projection are shared by the forward and backward directions and by both
// sense-conditioned decoding paths; the two directions have separate
// recurrent weights.
struct GeneratorParams {
  std::size_t vocab = 0;
  std::size_t emb_dim = 0;
  std::size_t hidden = 0;
  std::size_t max_len = 0;  // sentence length budget of the generation process

  Matrix embedding;     // vocab x emb_dim
  LstmCellParams fwd;   // left-to-right direction
  LstmCellParams bwd;   // right-to-left direction
  Matrix proj_w;        // vocab x hidden
  Matrix proj_b;        // vocab x 1

  static GeneratorParams init(std::size_t vocab, std::size_t emb_dim, std::size_t hidden,
                              std::size_t max_len, Rng& rng, double range = 0.08);

  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;

  void save(const std::string& path) const;
  static GeneratorParams load(const std::string& path);
};

// The pun word of one sense pair resolved against vocabulary and inventory:
// the two path-specific sense-tagged ids, the surface id, and the full set of
// ids whose emission would repeat the lemma (surface plus every sense-tagged
// form). The generation process never emits an excluded id, which is what
// guarantees the lemma appears exactly once.
struct PunWordContext {
  SensePair pair;
  int path1_id = -1;
  int path2_id = -1;
  int surface_id = -1;
  std::vector<int> excluded_ids;
};

PunWordContext resolve_pair(const SensePair& pair, const SenseInventory& inventory,
                            const Vocabulary& vocab);

// One generated sentence with the log-probabilities of every sampled step of
// the process that produced it (backward steps first, then forward steps,
// including the <bos>/<eos> termination factors when they were sampled).
struct GenerationTrace {
  std::vector<int> tokens;
  std::size_t target_pos = 0;
  SensePair pair;
  std::size_t max_len = 0;  // budget the sample was drawn under
  std::vector<double> step_logprobs;
  double logprob = 0.0;
};

// K sampled sentences with their rewards (filled in by batch_rewards).
struct SampleBatch {
  std::vector<GenerationTrace> traces;
  std::vector<double> rewards;
  std::size_t size() const { return traces.size(); }
};

enum class DecodeMode { kSample, kGreedy };

// Tape handles for a generator's parameters, aligned with parameters().
struct GeneratorNodes {
  Node embedding, proj_w, proj_b;
  LstmCellNodes fwd, bwd;
  std::vector<Node> ordered;
};

GeneratorNodes load_generator(Tape& tape, const GeneratorParams& params);

// Equal-weight mixture of the two sense paths' next-token distributions:
//   [softmax(W h1 + b) + softmax(W h2 + b)] / 2
Node mixture_distribution(Tape& tape, const GeneratorNodes& nodes, Node h1, Node h2);

// Value-level form of the mixture given the two hidden states.
Matrix mixture_step(const GeneratorParams& params, const Matrix& h1, const Matrix& h2);

// Differentiable log-probability of (tokens, target_pos) under the generation
// process with budget `max_len`. Requires every emitted token to be inside
// the process support; sampler-produced traces always are.
Node process_logprob_node(Tape& tape, const GeneratorNodes& nodes, const std::vector<int>& tokens,
                          std::size_t target_pos, const PunWordContext& ctx, std::size_t max_len,
                          std::vector<double>* step_logprobs = nullptr);

// Log-probability that the generation process (budget params.max_len) emits
// exactly this sentence; -infinity for sentences the process cannot produce.
double sentence_logprob(const GeneratorParams& params, const TaggedSentence& sentence,
                        const SensePair& pair, const SenseInventory& inventory,
                        const Vocabulary& vocab);

// Backward-then-forward constrained decoding around the pun word. Backward
// sampling stops at <bos> or after floor(max_len/2) tokens; forward sampling
// stops at <eos> or at the overall budget. Both directions sample from the
// dual-sense mixture restricted to the ids the process may emit.
GenerationTrace sample_sentence(const GeneratorParams& params, const SensePair& pair,
                                const SenseInventory& inventory, const Vocabulary& vocab, Rng& rng,
                                std::size_t max_len, DecodeMode mode = DecodeMode::kSample);

// One SGD step on the per-token negative log-likelihood of a sense-labeled
// batch; the forward model trains on each sentence, the backward model on its
// reversal from the target position. Returns the loss before the step.
double mle_pretrain_step(GeneratorParams& params, const std::vector<TaggedSentence>& batch,
                         const Vocabulary& vocab, double lr, double grad_clip = 0.0);

// REINFORCE step on the surrogate -(1/K) sum_k r_k * logprob_k. Rewards are
// constants; optionally the batch mean is subtracted as a baseline. Returns
// the surrogate value before the step.
double policy_gradient_step(GeneratorParams& params, const SampleBatch& samples,
                            const SenseInventory& inventory, const Vocabulary& vocab, double lr,
                            bool mean_baseline = false, double grad_clip = 0.0);

// Ordinary left-to-right LM score of a surface token sequence under the
// forward model with both paths collapsed (single-sense mode):
// log P(<bos> -> tokens -> <eos>).
double lm_logprob(const GeneratorParams& params, const std::vector<int>& surface_tokens);

// If the norm of the concatenated gradients exceeds `clip`, scales them down
// to that norm. clip <= 0 disables.
void clip_gradients(std::vector<Matrix>& grads, double clip);

}  // namespace pungan
