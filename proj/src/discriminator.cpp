#include "pungan/discriminator.hpp"

#include <algorithm>
#include <cmath>

#include "pungan/checkpoint.hpp"

namespace pungan {

namespace {

constexpr const char* kModelType = "discriminator";

std::vector<std::string> encoder_names() {
  std::vector<std::string> names = {"embedding"};
  for (const char* dir : {"fwd", "bwd"}) {
    for (const char* gate : {"w_xi", "w_hi", "b_i", "w_xf", "w_hf", "b_f", "w_xg", "w_hg", "b_g",
                             "w_xo", "w_ho", "b_o"}) {
      names.push_back(std::string(dir) + "." + gate);
    }
  }
  return names;
}

struct DiscNodes {
  Node embedding;
  LstmCellNodes fwd, bwd;
  std::vector<Node> encoder_ordered;
  std::map<std::string, std::pair<Node, Node>> head_nodes;  // lemma -> (u, b)
};

DiscNodes load_encoder(Tape& tape, const DiscriminatorParams& params) {
  DiscNodes n;
  n.embedding = tape.leaf(params.embedding);
  n.fwd = load_lstm(tape, params.fwd);
  n.bwd = load_lstm(tape, params.bwd);
  n.encoder_ordered = {n.embedding,
                       n.fwd.w_xi, n.fwd.w_hi, n.fwd.b_i, n.fwd.w_xf, n.fwd.w_hf, n.fwd.b_f,
                       n.fwd.w_xg, n.fwd.w_hg, n.fwd.b_g, n.fwd.w_xo, n.fwd.w_ho, n.fwd.b_o,
                       n.bwd.w_xi, n.bwd.w_hi, n.bwd.b_i, n.bwd.w_xf, n.bwd.w_hf, n.bwd.b_f,
                       n.bwd.w_xg, n.bwd.w_hg, n.bwd.b_g, n.bwd.w_xo, n.bwd.w_ho, n.bwd.b_o};
  return n;
}

std::pair<Node, Node> head_nodes_for(Tape& tape, DiscNodes& nodes,
                                     const DiscriminatorParams& params,
                                     const std::string& lemma) {
  auto it = nodes.head_nodes.find(lemma);
  if (it != nodes.head_nodes.end()) return it->second;
  const LemmaHead& head = params.head(lemma);
  auto loaded = std::make_pair(tape.leaf(head.u), tape.leaf(head.b));
  nodes.head_nodes[lemma] = loaded;
  return loaded;
}

std::vector<int> surface_tokens(const TaggedSentence& sentence, const Vocabulary& vocab) {
  std::vector<int> out;
  out.reserve(sentence.tokens.size());
  for (int id : sentence.tokens) out.push_back(vocab.surface_id(id));
  return out;
}

// Bi-LSTM class probabilities at the target position, as a tape node.
Node classify_node(Tape& tape, DiscNodes& nodes, const DiscriminatorParams& params,
                   const TaggedSentence& sentence, const Vocabulary& vocab) {
  if (sentence.tokens.empty() || sentence.target_pos >= sentence.tokens.size()) {
    throw std::invalid_argument("classify: target position out of range");
  }
  if (params.heads.find(sentence.lemma) == params.heads.end()) {
    throw ValidationError("classify: no head for lemma '" + sentence.lemma + "'");
  }
  const std::vector<int> ids = surface_tokens(sentence, vocab);
  const std::size_t len = ids.size();

  auto embed = [&](int id) {
    return tape.embed_row(nodes.embedding, static_cast<std::size_t>(id));
  };

  LstmState fwd_state = lstm_initial_state(tape, params.hidden);
  Node fwd_at_target{};
  for (std::size_t t = 0; t < len; ++t) {
    fwd_state = lstm_step(tape, nodes.fwd, embed(ids[t]), fwd_state);
    if (t == sentence.target_pos) fwd_at_target = fwd_state.h;
  }
  LstmState bwd_state = lstm_initial_state(tape, params.hidden);
  Node bwd_at_target{};
  for (std::size_t t = len; t-- > 0;) {
    bwd_state = lstm_step(tape, nodes.bwd, embed(ids[t]), bwd_state);
    if (t == sentence.target_pos) bwd_at_target = bwd_state.h;
  }

  Node context = tape.concat_rows(fwd_at_target, bwd_at_target);
  auto [u, b] = head_nodes_for(tape, nodes, params, sentence.lemma);
  return tape.softmax(tape.add(tape.matmul(u, context), b));
}

}  // namespace

DiscriminatorParams DiscriminatorParams::init(std::size_t vocab, std::size_t emb_dim,
                                              std::size_t hidden,
                                              const SenseInventory& inventory, Rng& rng,
                                              double range) {
  if (vocab < 3 || emb_dim == 0 || hidden == 0) {
    throw std::invalid_argument("discriminator init: all dimensions must be positive");
  }
  DiscriminatorParams p;
  p.vocab = vocab;
  p.emb_dim = emb_dim;
  p.hidden = hidden;
  p.embedding = uniform_init(vocab, emb_dim, rng, range);
  p.fwd = LstmCellParams::init(emb_dim, hidden, rng, range);
  p.bwd = LstmCellParams::init(emb_dim, hidden, rng, range);
  for (const auto& lemma : inventory.lemmas()) {
    LemmaHead head;
    head.senses = inventory.senses(lemma);
    const std::size_t classes = head.senses.size() + 1;
    head.u = uniform_init(classes, 2 * hidden, rng, range);
    head.b = uniform_init(classes, 1, rng, range);
    p.heads[lemma] = std::move(head);
  }
  return p;
}

const LemmaHead& DiscriminatorParams::head(const std::string& lemma) const {
  auto it = heads.find(lemma);
  if (it == heads.end()) throw ValidationError("no discriminator head for lemma '" + lemma + "'");
  return it->second;
}

std::vector<Matrix*> DiscriminatorParams::parameters() {
  std::vector<Matrix*> out = {&embedding};
  for (Matrix* m : fwd.parameters()) out.push_back(m);
  for (Matrix* m : bwd.parameters()) out.push_back(m);
  for (auto& [lemma, head] : heads) {
    out.push_back(&head.u);
    out.push_back(&head.b);
  }
  return out;
}

std::vector<const Matrix*> DiscriminatorParams::parameters() const {
  std::vector<const Matrix*> out = {&embedding};
  for (const Matrix* m : fwd.parameters()) out.push_back(m);
  for (const Matrix* m : bwd.parameters()) out.push_back(m);
  for (const auto& [lemma, head] : heads) {
    out.push_back(&head.u);
    out.push_back(&head.b);
  }
  return out;
}

void DiscriminatorParams::save(const std::string& path) const {
  nlohmann::json payload;
  payload["vocab"] = vocab;
  payload["emb_dim"] = emb_dim;
  payload["hidden"] = hidden;
  nlohmann::json mats;
  const auto names = encoder_names();
  std::vector<const Matrix*> encoder = {&embedding};
  for (const Matrix* m : fwd.parameters()) encoder.push_back(m);
  for (const Matrix* m : bwd.parameters()) encoder.push_back(m);
  for (std::size_t i = 0; i < encoder.size(); ++i) mats[names[i]] = matrix_to_json(*encoder[i]);
  payload["matrices"] = std::move(mats);
  nlohmann::json heads_json;
  for (const auto& [lemma, head] : heads) {
    nlohmann::json h;
    h["senses"] = head.senses;
    h["u"] = matrix_to_json(head.u);
    h["b"] = matrix_to_json(head.b);
    heads_json[lemma] = std::move(h);
  }
  payload["heads"] = std::move(heads_json);
  write_checkpoint(path, kModelType, std::move(payload));
}

DiscriminatorParams DiscriminatorParams::load(const std::string& path) {
  nlohmann::json payload = read_checkpoint(path, kModelType);
  DiscriminatorParams p;
  p.vocab = payload.at("vocab").get<std::size_t>();
  p.emb_dim = payload.at("emb_dim").get<std::size_t>();
  p.hidden = payload.at("hidden").get<std::size_t>();
  p.fwd.input_dim = p.bwd.input_dim = p.emb_dim;
  p.fwd.hidden = p.bwd.hidden = p.hidden;
  const auto names = encoder_names();
  std::vector<Matrix*> encoder = {&p.embedding};
  for (Matrix* m : p.fwd.parameters()) encoder.push_back(m);
  for (Matrix* m : p.bwd.parameters()) encoder.push_back(m);
  const auto& mats = payload.at("matrices");
  for (std::size_t i = 0; i < encoder.size(); ++i) {
    if (!mats.contains(names[i])) {
      throw ValidationError("discriminator checkpoint missing matrix " + names[i]);
    }
    *encoder[i] = matrix_from_json(mats[names[i]], names[i]);
  }
  for (const auto& [lemma, h] : payload.at("heads").items()) {
    LemmaHead head;
    head.senses = h.at("senses").get<std::vector<std::string>>();
    head.u = matrix_from_json(h.at("u"), lemma + ".u");
    head.b = matrix_from_json(h.at("b"), lemma + ".b");
    if (head.u.rows != head.senses.size() + 1 || head.b.rows != head.senses.size() + 1 ||
        head.u.cols != 2 * p.hidden) {
      throw ValidationError("discriminator checkpoint head for '" + lemma +
                            "' has inconsistent shapes");
    }
    p.heads[lemma] = std::move(head);
  }
  return p;
}

SenseDistribution classify(const DiscriminatorParams& params, const TaggedSentence& sentence,
                           const Vocabulary& vocab) {
  Tape tape;
  DiscNodes nodes = load_encoder(tape, params);
  Node probs = classify_node(tape, nodes, params, sentence, vocab);
  SenseDistribution out;
  out.lemma = sentence.lemma;
  out.probabilities = tape.value(probs).data;
  return out;
}

std::pair<double, double> sense_pair_probs(const DiscriminatorParams& params,
                                           const TaggedSentence& sentence, const SensePair& pair,
                                           const SenseInventory& inventory,
                                           const Vocabulary& vocab) {
  if (sentence.lemma != pair.lemma) {
    throw std::invalid_argument("sense_pair_probs: sentence lemma '" + sentence.lemma +
                                "' does not match pair lemma '" + pair.lemma + "'");
  }
  pair.validate(inventory);
  SenseDistribution dist = classify(params, sentence, vocab);
  const std::size_t i1 = inventory.sense_index(pair.lemma, pair.s1);
  const std::size_t i2 = inventory.sense_index(pair.lemma, pair.s2);
  return {dist.probabilities[i1], dist.probabilities[i2]};
}

namespace {

Node build_loss(Tape& tape, DiscNodes& nodes, const DiscriminatorParams& params,
                const std::vector<TaggedSentence>& labeled,
                const std::vector<TaggedSentence>& unlabeled,
                const std::vector<TaggedSentence>& generated, const Vocabulary& vocab) {
  if (labeled.empty() && unlabeled.empty() && generated.empty()) {
    throw std::invalid_argument("discriminator loss: all batches empty");
  }
  std::vector<Node> term_sums;

  auto add_term = [&](const std::vector<TaggedSentence>& batch, auto per_sentence) {
    if (batch.empty()) return;
    std::vector<Node> parts;
    parts.reserve(batch.size());
    for (const auto& s : batch) {
      Node probs = classify_node(tape, nodes, params, s, vocab);
      parts.push_back(per_sentence(s, probs));
    }
    term_sums.push_back(tape.scale(tape.sum(parts), 1.0 / static_cast<double>(parts.size())));
  };

  add_term(labeled, [&](const TaggedSentence& s, Node probs) {
    if (!s.labeled()) {
      throw std::invalid_argument("discriminator loss: labeled batch has an unlabeled sentence");
    }
    const auto& senses = params.head(s.lemma).senses;
    auto it = std::find(senses.begin(), senses.end(), *s.sense);
    if (it == senses.end()) {
      throw ValidationError("discriminator loss: sense '" + *s.sense + "' unknown for lemma '" +
                            s.lemma + "'");
    }
    return tape.cross_entropy(probs, static_cast<std::size_t>(it - senses.begin()));
  });

  add_term(unlabeled, [&](const TaggedSentence& s, Node probs) {
    // -log p(y < k+1) == -log (1 - p(generated))
    const std::size_t classes = params.head(s.lemma).senses.size() + 1;
    std::vector<double> real_mask(classes, 1.0);
    real_mask.back() = 0.0;
    return tape.neg(tape.log(tape.dot_mask(probs, real_mask)));
  });

  add_term(generated, [&](const TaggedSentence& s, Node probs) {
    const std::size_t classes = params.head(s.lemma).senses.size() + 1;
    return tape.cross_entropy(probs, classes - 1);
  });

  return tape.sum(term_sums);
}

}  // namespace

double discriminator_loss(const DiscriminatorParams& params,
                          const std::vector<TaggedSentence>& labeled,
                          const std::vector<TaggedSentence>& unlabeled,
                          const std::vector<TaggedSentence>& generated, const Vocabulary& vocab) {
  Tape tape;
  DiscNodes nodes = load_encoder(tape, params);
  Node loss = build_loss(tape, nodes, params, labeled, unlabeled, generated, vocab);
  return tape.value(loss).scalar();
}

double discriminator_train_step(DiscriminatorParams& params,
                                const std::vector<TaggedSentence>& labeled,
                                const std::vector<TaggedSentence>& unlabeled,
                                const std::vector<TaggedSentence>& generated,
                                const Vocabulary& vocab, double lr, double grad_clip) {
  Tape tape;
  DiscNodes nodes = load_encoder(tape, params);
  Node loss = build_loss(tape, nodes, params, labeled, unlabeled, generated, vocab);
  const double value = tape.value(loss).scalar();
  tape.backward(loss);

  std::vector<Matrix*> targets = {&params.embedding};
  for (Matrix* m : params.fwd.parameters()) targets.push_back(m);
  for (Matrix* m : params.bwd.parameters()) targets.push_back(m);
  std::vector<Matrix> grads;
  for (Node n : nodes.encoder_ordered) grads.push_back(tape.grad(n));
  for (auto& [lemma, loaded] : nodes.head_nodes) {
    LemmaHead& head = params.heads.at(lemma);
    targets.push_back(&head.u);
    grads.push_back(tape.grad(loaded.first));
    targets.push_back(&head.b);
    grads.push_back(tape.grad(loaded.second));
  }
  clip_gradients(grads, grad_clip);
  for (std::size_t i = 0; i < targets.size(); ++i) sgd_step(*targets[i], grads[i], lr);
  return value;
}

TaggedSentence trace_as_sentence(const GenerationTrace& trace) {
  TaggedSentence s;
  s.tokens = trace.tokens;
  s.target_pos = trace.target_pos;
  s.lemma = trace.pair.lemma;
  return s;
}

}  // namespace pungan
