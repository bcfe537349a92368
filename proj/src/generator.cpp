#include "pungan/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pungan/checkpoint.hpp"

namespace pungan {

namespace {

constexpr const char* kModelType = "generator";

std::vector<std::string> parameter_names() {
  std::vector<std::string> names = {"embedding"};
  for (const char* dir : {"fwd", "bwd"}) {
    for (const char* gate : {"w_xi", "w_hi", "b_i", "w_xf", "w_hf", "b_f", "w_xg", "w_hg", "b_g",
                             "w_xo", "w_ho", "b_o"}) {
      names.push_back(std::string(dir) + "." + gate);
    }
  }
  names.push_back("proj_w");
  names.push_back("proj_b");
  return names;
}

// Support masks of the generation process. Backward steps may emit anything
// except <eos> and the pun lemma's forms, and terminate on <bos>; forward
// steps are the mirror image.
struct ProcessMasks {
  std::vector<double> backward;
  std::vector<double> forward;
};

ProcessMasks make_masks(std::size_t vocab, const PunWordContext& ctx) {
  ProcessMasks m;
  m.backward.assign(vocab, 1.0);
  m.forward.assign(vocab, 1.0);
  m.backward[kEosId] = 0.0;
  m.forward[kBosId] = 0.0;
  for (int id : ctx.excluded_ids) {
    m.backward[static_cast<std::size_t>(id)] = 0.0;
    m.forward[static_cast<std::size_t>(id)] = 0.0;
  }
  return m;
}

bool emittable(int token, const PunWordContext& ctx) {
  if (token == kBosId || token == kEosId) return false;
  return std::find(ctx.excluded_ids.begin(), ctx.excluded_ids.end(), token) ==
         ctx.excluded_ids.end();
}

// Structural reachability of a sentence under the process; empty string means
// reachable.
std::string unreachable_reason(const std::vector<int>& tokens, std::size_t target_pos,
                               const PunWordContext& ctx, std::size_t max_len) {
  if (max_len < 1) return "max_len must be >= 1";
  if (tokens.empty() || target_pos >= tokens.size()) return "target position out of range";
  if (tokens.size() > max_len) return "sentence longer than the budget";
  if (target_pos > max_len / 2) return "more leading tokens than the backward budget";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i == target_pos) continue;
    if (!emittable(tokens[i], ctx)) return "token outside the process support";
  }
  return "";
}

// Two sense-conditioned copies of one direction's recurrence.
struct DualPath {
  Tape& tape;
  const GeneratorNodes& nodes;
  const LstmCellNodes& cell;
  LstmState st1, st2;

  DualPath(Tape& t, const GeneratorNodes& n, const LstmCellNodes& c, std::size_t hidden)
      : tape(t), nodes(n), cell(c), st1(lstm_initial_state(t, hidden)), st2(st1) {}

  void consume(int tok1, int tok2) {
    Node e1 = tape.embed_row(nodes.embedding, static_cast<std::size_t>(tok1));
    Node e2 = tok2 == tok1 ? e1 : tape.embed_row(nodes.embedding, static_cast<std::size_t>(tok2));
    st1 = lstm_step(tape, cell, e1, st1);
    st2 = lstm_step(tape, cell, e2, st2);
  }

  Node distribution() { return mixture_distribution(tape, nodes, st1.h, st2.h); }
};

// log of the renormalized in-support probability of `token` under `dist`.
Node masked_logprob(Tape& tape, Node dist, int token, const std::vector<double>& mask) {
  if (mask[static_cast<std::size_t>(token)] == 0.0) {
    throw std::invalid_argument("generator: token outside the process support");
  }
  Node lp = tape.log(tape.pick(dist, static_cast<std::size_t>(token)));
  Node norm = tape.log(tape.dot_mask(dist, mask));
  return tape.add(lp, tape.neg(norm));
}

void apply_gradients(GeneratorParams& params, Tape& tape, const GeneratorNodes& nodes, double lr,
                     double grad_clip) {
  std::vector<Matrix> grads;
  grads.reserve(nodes.ordered.size());
  for (Node n : nodes.ordered) grads.push_back(tape.grad(n));
  clip_gradients(grads, grad_clip);
  auto target = params.parameters();
  for (std::size_t i = 0; i < target.size(); ++i) {
    sgd_step(*target[i], grads[i], lr);
  }
}

}  // namespace

GeneratorParams GeneratorParams::init(std::size_t vocab, std::size_t emb_dim, std::size_t hidden,
                                      std::size_t max_len, Rng& rng, double range) {
  if (vocab < 3 || emb_dim == 0 || hidden == 0 || max_len == 0) {
    throw std::invalid_argument("generator init: all dimensions must be positive");
  }
  GeneratorParams p;
  p.vocab = vocab;
  p.emb_dim = emb_dim;
  p.hidden = hidden;
  p.max_len = max_len;
  p.embedding = uniform_init(vocab, emb_dim, rng, range);
  p.fwd = LstmCellParams::init(emb_dim, hidden, rng, range);
  p.bwd = LstmCellParams::init(emb_dim, hidden, rng, range);
  p.proj_w = uniform_init(vocab, hidden, rng, range);
  p.proj_b = uniform_init(vocab, 1, rng, range);
  return p;
}

std::vector<Matrix*> GeneratorParams::parameters() {
  std::vector<Matrix*> out = {&embedding};
  for (Matrix* m : fwd.parameters()) out.push_back(m);
  for (Matrix* m : bwd.parameters()) out.push_back(m);
  out.push_back(&proj_w);
  out.push_back(&proj_b);
  return out;
}

std::vector<const Matrix*> GeneratorParams::parameters() const {
  std::vector<const Matrix*> out = {&embedding};
  for (const Matrix* m : fwd.parameters()) out.push_back(m);
  for (const Matrix* m : bwd.parameters()) out.push_back(m);
  out.push_back(&proj_w);
  out.push_back(&proj_b);
  return out;
}

void GeneratorParams::save(const std::string& path) const {
  nlohmann::json payload;
  payload["vocab"] = vocab;
  payload["emb_dim"] = emb_dim;
  payload["hidden"] = hidden;
  payload["max_len"] = max_len;
  nlohmann::json mats;
  const auto names = parameter_names();
  const auto mat = parameters();
  for (std::size_t i = 0; i < mat.size(); ++i) mats[names[i]] = matrix_to_json(*mat[i]);
  payload["matrices"] = std::move(mats);
  write_checkpoint(path, kModelType, std::move(payload));
}

GeneratorParams GeneratorParams::load(const std::string& path) {
  nlohmann::json payload = read_checkpoint(path, kModelType);
  GeneratorParams p;
  p.vocab = payload.at("vocab").get<std::size_t>();
  p.emb_dim = payload.at("emb_dim").get<std::size_t>();
  p.hidden = payload.at("hidden").get<std::size_t>();
  p.max_len = payload.at("max_len").get<std::size_t>();
  p.fwd.input_dim = p.bwd.input_dim = p.emb_dim;
  p.fwd.hidden = p.bwd.hidden = p.hidden;
  const auto names = parameter_names();
  auto mat = p.parameters();
  const auto& mats = payload.at("matrices");
  for (std::size_t i = 0; i < mat.size(); ++i) {
    if (!mats.contains(names[i])) {
      throw ValidationError("generator checkpoint missing matrix " + names[i]);
    }
    *mat[i] = matrix_from_json(mats[names[i]], names[i]);
  }
  if (p.embedding.rows != p.vocab || p.embedding.cols != p.emb_dim ||
      p.proj_w.rows != p.vocab || p.proj_w.cols != p.hidden || p.proj_b.rows != p.vocab) {
    throw ValidationError("generator checkpoint has inconsistent shapes");
  }
  return p;
}

PunWordContext resolve_pair(const SensePair& pair, const SenseInventory& inventory,
                            const Vocabulary& vocab) {
  pair.validate(inventory);
  PunWordContext ctx;
  ctx.pair = pair;
  ctx.path1_id = vocab.id_of(Vocabulary::sense_tagged_token(pair.lemma, pair.s1));
  ctx.path2_id = vocab.id_of(Vocabulary::sense_tagged_token(pair.lemma, pair.s2));
  ctx.surface_id = vocab.id_of(pair.lemma);
  ctx.excluded_ids.push_back(ctx.surface_id);
  for (const auto& sense : inventory.senses(pair.lemma)) {
    ctx.excluded_ids.push_back(vocab.id_of(Vocabulary::sense_tagged_token(pair.lemma, sense)));
  }
  return ctx;
}

GeneratorNodes load_generator(Tape& tape, const GeneratorParams& params) {
  GeneratorNodes n;
  n.embedding = tape.leaf(params.embedding);
  n.fwd = load_lstm(tape, params.fwd);
  n.bwd = load_lstm(tape, params.bwd);
  n.proj_w = tape.leaf(params.proj_w);
  n.proj_b = tape.leaf(params.proj_b);
  n.ordered = {n.embedding,
               n.fwd.w_xi, n.fwd.w_hi, n.fwd.b_i, n.fwd.w_xf, n.fwd.w_hf, n.fwd.b_f,
               n.fwd.w_xg, n.fwd.w_hg, n.fwd.b_g, n.fwd.w_xo, n.fwd.w_ho, n.fwd.b_o,
               n.bwd.w_xi, n.bwd.w_hi, n.bwd.b_i, n.bwd.w_xf, n.bwd.w_hf, n.bwd.b_f,
               n.bwd.w_xg, n.bwd.w_hg, n.bwd.b_g, n.bwd.w_xo, n.bwd.w_ho, n.bwd.b_o,
               n.proj_w, n.proj_b};
  return n;
}

Node mixture_distribution(Tape& tape, const GeneratorNodes& nodes, Node h1, Node h2) {
  Node logits1 = tape.add(tape.matmul(nodes.proj_w, h1), nodes.proj_b);
  Node logits2 = tape.add(tape.matmul(nodes.proj_w, h2), nodes.proj_b);
  return tape.scale(tape.add(tape.softmax(logits1), tape.softmax(logits2)), 0.5);
}

Matrix mixture_step(const GeneratorParams& params, const Matrix& h1, const Matrix& h2) {
  Tape tape;
  GeneratorNodes nodes = load_generator(tape, params);
  Node dist = mixture_distribution(tape, nodes, tape.leaf(h1), tape.leaf(h2));
  return tape.value(dist);
}

Node process_logprob_node(Tape& tape, const GeneratorNodes& nodes, const std::vector<int>& tokens,
                          std::size_t target_pos, const PunWordContext& ctx, std::size_t max_len,
                          std::vector<double>* step_logprobs) {
  const std::string reason = unreachable_reason(tokens, target_pos, ctx, max_len);
  if (!reason.empty()) throw std::invalid_argument("process logprob: " + reason);

  const std::size_t hidden = tape.value(nodes.proj_w).cols;
  const std::size_t vocab = tape.value(nodes.proj_w).rows;
  const ProcessMasks masks = make_masks(vocab, ctx);
  const std::size_t backward_budget = max_len / 2;
  const bool bos_factor = target_pos < backward_budget;
  const bool eos_factor = tokens.size() < max_len;

  std::vector<Node> terms;
  auto record = [&](Node term) {
    if (step_logprobs) step_logprobs->push_back(tape.value(term).scalar());
    terms.push_back(term);
  };

  // Right-to-left from the pun word.
  std::vector<int> backward_preds;
  for (std::size_t j = target_pos; j-- > 0;) backward_preds.push_back(tokens[j]);
  if (bos_factor) backward_preds.push_back(kBosId);
  DualPath back(tape, nodes, nodes.bwd, hidden);
  back.consume(ctx.path1_id, ctx.path2_id);
  for (std::size_t i = 0; i < backward_preds.size(); ++i) {
    record(masked_logprob(tape, back.distribution(), backward_preds[i], masks.backward));
    if (i + 1 < backward_preds.size()) back.consume(backward_preds[i], backward_preds[i]);
  }

  // Left-to-right continuation after consuming <bos>, the prefix, and the
  // pun word.
  DualPath fwd(tape, nodes, nodes.fwd, hidden);
  fwd.consume(kBosId, kBosId);
  for (std::size_t j = 0; j < target_pos; ++j) fwd.consume(tokens[j], tokens[j]);
  fwd.consume(ctx.path1_id, ctx.path2_id);
  std::vector<int> forward_preds(tokens.begin() + static_cast<long>(target_pos) + 1, tokens.end());
  if (eos_factor) forward_preds.push_back(kEosId);
  for (std::size_t i = 0; i < forward_preds.size(); ++i) {
    record(masked_logprob(tape, fwd.distribution(), forward_preds[i], masks.forward));
    if (i + 1 < forward_preds.size()) fwd.consume(forward_preds[i], forward_preds[i]);
  }

  if (terms.empty()) return tape.leaf(Matrix(1, 1, {0.0}));
  return tape.sum(terms);
}

double sentence_logprob(const GeneratorParams& params, const TaggedSentence& sentence,
                        const SensePair& pair, const SenseInventory& inventory,
                        const Vocabulary& vocab) {
  if (sentence.lemma != pair.lemma) {
    throw std::invalid_argument("sentence_logprob: sentence lemma '" + sentence.lemma +
                                "' does not match pair lemma '" + pair.lemma + "'");
  }
  PunWordContext ctx = resolve_pair(pair, inventory, vocab);
  if (sentence.target_pos >= sentence.tokens.size()) {
    throw std::invalid_argument("sentence_logprob: target position out of range");
  }
  const int target_token = sentence.tokens[sentence.target_pos];
  if (vocab.surface_id(target_token) != ctx.surface_id) {
    throw std::invalid_argument("sentence_logprob: target token is not a form of lemma '" +
                                pair.lemma + "'");
  }
  if (!unreachable_reason(sentence.tokens, sentence.target_pos, ctx, params.max_len).empty()) {
    return -std::numeric_limits<double>::infinity();
  }
  Tape tape;
  GeneratorNodes nodes = load_generator(tape, params);
  Node lp = process_logprob_node(tape, nodes, sentence.tokens, sentence.target_pos, ctx,
                                 params.max_len);
  return tape.value(lp).scalar();
}

GenerationTrace sample_sentence(const GeneratorParams& params, const SensePair& pair,
                                const SenseInventory& inventory, const Vocabulary& vocab, Rng& rng,
                                std::size_t max_len, DecodeMode mode) {
  if (max_len < 1) throw std::invalid_argument("sample_sentence: max_len must be >= 1");
  PunWordContext ctx = resolve_pair(pair, inventory, vocab);
  Tape tape;
  GeneratorNodes nodes = load_generator(tape, params);
  const ProcessMasks masks = make_masks(params.vocab, ctx);
  const std::size_t backward_budget = max_len / 2;

  GenerationTrace trace;
  trace.pair = pair;
  trace.max_len = max_len;

  auto draw = [&](const Matrix& probs, const std::vector<double>& mask) {
    std::vector<double> weights(probs.data);
    double norm = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] *= mask[i];
      norm += weights[i];
    }
    std::size_t choice;
    if (mode == DecodeMode::kGreedy) {
      choice = static_cast<std::size_t>(
          std::max_element(weights.begin(), weights.end()) - weights.begin());
    } else {
      choice = rng.sample_weighted(weights);
    }
    trace.step_logprobs.push_back(std::log(probs.data[choice]) - std::log(norm));
    return static_cast<int>(choice);
  };

  // Backward phase: collect tokens to the left of the pun word.
  std::vector<int> left;  // in sampling order (nearest to the pun word first)
  DualPath back(tape, nodes, nodes.bwd, params.hidden);
  back.consume(ctx.path1_id, ctx.path2_id);
  while (left.size() < backward_budget) {
    const int tok = draw(tape.value(back.distribution()), masks.backward);
    if (tok == kBosId) break;
    left.push_back(tok);
    if (left.size() < backward_budget) back.consume(tok, tok);
  }

  trace.tokens.assign(left.rbegin(), left.rend());
  trace.target_pos = trace.tokens.size();
  trace.tokens.push_back(ctx.surface_id);

  // Forward phase: consume the prefix, then extend to the right.
  DualPath fwd(tape, nodes, nodes.fwd, params.hidden);
  fwd.consume(kBosId, kBosId);
  for (std::size_t j = 0; j < trace.target_pos; ++j) fwd.consume(trace.tokens[j], trace.tokens[j]);
  fwd.consume(ctx.path1_id, ctx.path2_id);
  while (trace.tokens.size() < max_len) {
    const int tok = draw(tape.value(fwd.distribution()), masks.forward);
    if (tok == kEosId) break;
    trace.tokens.push_back(tok);
    if (trace.tokens.size() < max_len) fwd.consume(tok, tok);
  }

  trace.logprob = std::accumulate(trace.step_logprobs.begin(), trace.step_logprobs.end(), 0.0);
  return trace;
}

double mle_pretrain_step(GeneratorParams& params, const std::vector<TaggedSentence>& batch,
                         const Vocabulary& vocab, double lr, double grad_clip) {
  if (batch.empty()) throw std::invalid_argument("mle_pretrain_step: empty batch");
  for (const auto& s : batch) {
    if (!s.labeled()) throw std::invalid_argument("mle_pretrain_step: unlabeled sentence in batch");
    if (s.target_pos >= s.tokens.size()) {
      throw std::invalid_argument("mle_pretrain_step: target position out of range");
    }
    if (!vocab.is_sense_tagged(s.tokens[s.target_pos])) {
      throw std::invalid_argument("mle_pretrain_step: target token is not sense-tagged");
    }
  }

  Tape tape;
  GeneratorNodes nodes = load_generator(tape, params);
  std::vector<Node> terms;
  std::size_t predictions = 0;

  auto lm_chain = [&](const LstmCellNodes& cell, const std::vector<int>& inputs,
                      const std::vector<int>& targets) {
    LstmState st = lstm_initial_state(tape, params.hidden);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      st = lstm_step(tape, cell, tape.embed_row(nodes.embedding, static_cast<std::size_t>(inputs[k])), st);
      Node probs = tape.softmax(tape.add(tape.matmul(nodes.proj_w, st.h), nodes.proj_b));
      terms.push_back(tape.cross_entropy(probs, static_cast<std::size_t>(targets[k])));
      ++predictions;
    }
  };

  for (const auto& s : batch) {
    // Forward model: <bos> w_1 ... w_n -> w_1 ... w_n <eos>
    std::vector<int> fwd_inputs = {kBosId};
    fwd_inputs.insert(fwd_inputs.end(), s.tokens.begin(), s.tokens.end());
    std::vector<int> fwd_targets = s.tokens;
    fwd_targets.push_back(kEosId);
    lm_chain(nodes.fwd, fwd_inputs, fwd_targets);

    // Backward model: reversal starting at the target position, ending with
    // the <bos> prediction, matching how generation walks leftward.
    std::vector<int> bwd_targets;
    for (std::size_t j = s.target_pos; j-- > 0;) bwd_targets.push_back(s.tokens[j]);
    bwd_targets.push_back(kBosId);
    std::vector<int> bwd_inputs = {s.tokens[s.target_pos]};
    bwd_inputs.insert(bwd_inputs.end(), bwd_targets.begin(), bwd_targets.end() - 1);
    lm_chain(nodes.bwd, bwd_inputs, bwd_targets);
  }

  Node loss = tape.scale(tape.sum(terms), 1.0 / static_cast<double>(predictions));
  tape.backward(loss);
  const double value = tape.value(loss).scalar();
  apply_gradients(params, tape, nodes, lr, grad_clip);
  return value;
}

double policy_gradient_step(GeneratorParams& params, const SampleBatch& samples,
                            const SenseInventory& inventory, const Vocabulary& vocab, double lr,
                            bool mean_baseline, double grad_clip) {
  if (samples.size() == 0) throw std::invalid_argument("policy_gradient_step: empty batch");
  if (samples.rewards.size() != samples.traces.size()) {
    throw std::invalid_argument("policy_gradient_step: rewards/traces size mismatch");
  }
  double baseline = 0.0;
  if (mean_baseline) {
    baseline = std::accumulate(samples.rewards.begin(), samples.rewards.end(), 0.0) /
               static_cast<double>(samples.size());
  }
  Tape tape;
  GeneratorNodes nodes = load_generator(tape, params);
  std::vector<Node> terms;
  const double inv_k = 1.0 / static_cast<double>(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const GenerationTrace& trace = samples.traces[k];
    PunWordContext ctx = resolve_pair(trace.pair, inventory, vocab);
    Node lp = process_logprob_node(tape, nodes, trace.tokens, trace.target_pos, ctx,
                                   trace.max_len);
    terms.push_back(tape.scale(lp, -(samples.rewards[k] - baseline) * inv_k));
  }
  Node surrogate = tape.sum(terms);
  tape.backward(surrogate);
  const double value = tape.value(surrogate).scalar();
  apply_gradients(params, tape, nodes, lr, grad_clip);
  return value;
}

double lm_logprob(const GeneratorParams& params, const std::vector<int>& surface_tokens) {
  Tape tape;
  GeneratorNodes nodes = load_generator(tape, params);
  LstmState st = lstm_initial_state(tape, params.hidden);
  std::vector<int> inputs = {kBosId};
  inputs.insert(inputs.end(), surface_tokens.begin(), surface_tokens.end());
  std::vector<int> targets = surface_tokens;
  targets.push_back(kEosId);
  double total = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    st = lstm_step(tape, nodes.fwd,
                   tape.embed_row(nodes.embedding, static_cast<std::size_t>(inputs[k])), st);
    Node probs = tape.softmax(tape.add(tape.matmul(nodes.proj_w, st.h), nodes.proj_b));
    total += std::log(tape.value(probs).data[static_cast<std::size_t>(targets[k])]);
  }
  return total;
}

void clip_gradients(std::vector<Matrix>& grads, double clip) {
  if (clip <= 0.0) return;
  double sq = 0.0;
  for (const Matrix& g : grads) {
    for (double v : g.data) sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm <= clip) return;
  const double factor = clip / norm;
  for (Matrix& g : grads) {
    for (double& v : g.data) v *= factor;
  }
}

}  // namespace pungan
