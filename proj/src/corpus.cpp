#include "pungan/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace pungan {

namespace {

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  return in;
}

}  // namespace

void SenseInventory::add(const std::string& lemma, const std::string& sense) {
  auto it = senses_.find(lemma);
  if (it == senses_.end()) {
    order_.push_back(lemma);
    senses_[lemma] = {sense};
    return;
  }
  if (std::find(it->second.begin(), it->second.end(), sense) != it->second.end()) {
    throw ValidationError("duplicate sense '" + sense + "' for lemma '" + lemma + "'");
  }
  it->second.push_back(sense);
}

bool SenseInventory::has_lemma(const std::string& lemma) const {
  return senses_.count(lemma) > 0;
}

bool SenseInventory::has_sense(const std::string& lemma, const std::string& sense) const {
  auto it = senses_.find(lemma);
  if (it == senses_.end()) return false;
  return std::find(it->second.begin(), it->second.end(), sense) != it->second.end();
}

std::size_t SenseInventory::sense_count(const std::string& lemma) const {
  return senses(lemma).size();
}

const std::vector<std::string>& SenseInventory::senses(const std::string& lemma) const {
  auto it = senses_.find(lemma);
  if (it == senses_.end()) throw ValidationError("unknown lemma: " + lemma);
  return it->second;
}

std::size_t SenseInventory::sense_index(const std::string& lemma, const std::string& sense) const {
  const auto& list = senses(lemma);
  auto it = std::find(list.begin(), list.end(), sense);
  if (it == list.end()) {
    throw ValidationError("unknown sense '" + sense + "' for lemma '" + lemma + "'");
  }
  return static_cast<std::size_t>(it - list.begin());
}

void SensePair::validate(const SenseInventory& inventory) const {
  if (s1 == s2) throw ValidationError("sense pair for '" + lemma + "' repeats sense '" + s1 + "'");
  if (!inventory.has_sense(lemma, s1)) {
    throw ValidationError("pair sense '" + s1 + "' not in inventory for lemma '" + lemma + "'");
  }
  if (!inventory.has_sense(lemma, s2)) {
    throw ValidationError("pair sense '" + s2 + "' not in inventory for lemma '" + lemma + "'");
  }
}

Vocabulary::Vocabulary() {
  add(kBosToken);
  add(kEosToken);
  add(kUnkToken);
}

int Vocabulary::add(const std::string& token) {
  auto it = ids_.find(token);
  if (it != ids_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  ids_[token] = id;
  return id;
}

int Vocabulary::encode(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnkId : it->second;
}

int Vocabulary::id_of(const std::string& token) const {
  auto it = ids_.find(token);
  if (it == ids_.end()) throw ValidationError("token not in vocabulary: " + token);
  return it->second;
}

bool Vocabulary::contains(const std::string& token) const { return ids_.count(token) > 0; }

const std::string& Vocabulary::decode(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw ValidationError("token id out of range: " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::string Vocabulary::sense_tagged_token(const std::string& lemma, const std::string& sense) {
  return lemma + kSenseSeparator + sense;
}

bool Vocabulary::is_sense_tagged(int id) const {
  return decode(id).find(kSenseSeparator) != std::string::npos;
}

int Vocabulary::surface_id(int id) const {
  const std::string& tok = decode(id);
  auto pos = tok.find(kSenseSeparator);
  if (pos == std::string::npos) return id;
  return encode(tok.substr(0, pos));
}

std::vector<int> Vocabulary::encode_all(const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(encode(t));
  return out;
}

std::vector<std::string> Vocabulary::decode_all(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(decode(id));
  return out;
}

SenseInventory load_sense_inventory(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  SenseInventory inventory;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected 'lemma<TAB>sense-id'");
    }
    std::string lemma = lowercase(line.substr(0, tab));
    std::string sense = lowercase(line.substr(tab + 1));
    if (lemma.find(kSenseSeparator) != std::string::npos ||
        sense.find(kSenseSeparator) != std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": '" + kSenseSeparator +
                       "' is reserved for sense-tagged tokens");
    }
    inventory.add(lemma, sense);
  }
  return inventory;
}

namespace {

RawTaggedSentence parse_record(const nlohmann::json& rec, const SenseInventory& inventory,
                               const std::string& where, bool* no_target) {
  *no_target = false;
  if (!rec.is_object() || !rec.contains("tokens") || !rec["tokens"].is_array()) {
    throw ParseError(where + ": record must be an object with a 'tokens' array");
  }
  RawTaggedSentence out;
  for (const auto& t : rec["tokens"]) {
    if (!t.is_string()) throw ParseError(where + ": tokens must be strings");
    std::string tok = lowercase(t.get<std::string>());
    if (tok.empty()) throw ValidationError(where + ": empty token");
    if (tok.find(kSenseSeparator) != std::string::npos) {
      throw ValidationError(where + ": corpus token '" + tok + "' contains reserved '" +
                            kSenseSeparator + "'");
    }
    if (tok.find_first_of(" \t") != std::string::npos) {
      throw ValidationError(where + ": token '" + tok + "' contains whitespace");
    }
    out.tokens.push_back(std::move(tok));
  }
  if (out.tokens.empty()) throw ValidationError(where + ": sentence has no tokens");

  const bool has_target = rec.contains("target");
  const bool has_lemma = rec.contains("lemma");
  const bool has_sense = rec.contains("sense");
  if (has_sense && (!has_target || !has_lemma)) {
    throw ParseError(where + ": labeled record needs 'target' and 'lemma'");
  }
  if (has_target != has_lemma) {
    throw ParseError(where + ": 'target' and 'lemma' must appear together");
  }

  if (!has_target) {
    // Unlabeled free text: adopt the first token that is an inventory lemma.
    for (std::size_t i = 0; i < out.tokens.size(); ++i) {
      if (inventory.has_lemma(out.tokens[i])) {
        out.target_pos = i;
        out.lemma = out.tokens[i];
        return out;
      }
    }
    *no_target = true;
    return out;
  }

  if (!rec["target"].is_number_integer()) {
    throw ParseError(where + ": 'target' must be an integer");
  }
  const long long target = rec["target"].get<long long>();
  if (target < 0 || static_cast<std::size_t>(target) >= out.tokens.size()) {
    throw ValidationError(where + ": target index " + std::to_string(target) +
                          " out of range for " + std::to_string(out.tokens.size()) + " tokens");
  }
  out.target_pos = static_cast<std::size_t>(target);
  out.lemma = lowercase(rec["lemma"].get<std::string>());
  if (!inventory.has_lemma(out.lemma)) {
    throw ValidationError(where + ": lemma '" + out.lemma + "' not in the sense inventory");
  }
  if (out.tokens[out.target_pos] != out.lemma) {
    throw ValidationError(where + ": token '" + out.tokens[out.target_pos] + "' at target " +
                          std::to_string(out.target_pos) + " does not match lemma '" + out.lemma +
                          "'");
  }
  if (has_sense) {
    out.sense = lowercase(rec["sense"].get<std::string>());
    if (!inventory.has_sense(out.lemma, *out.sense)) {
      throw ValidationError(where + ": sense '" + *out.sense + "' not in inventory for lemma '" +
                            out.lemma + "'");
    }
    out.tokens[out.target_pos] = Vocabulary::sense_tagged_token(out.lemma, *out.sense);
  }
  return out;
}

}  // namespace

CorpusLoadResult load_tagged_corpus(const std::string& path, const SenseInventory& inventory,
                                    std::size_t max_len) {
  std::ifstream in = open_or_throw(path);
  CorpusLoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": invalid JSON: " + e.what());
    }
    bool no_target = false;
    RawTaggedSentence sentence = parse_record(rec, inventory, where, &no_target);
    if (no_target) {
      ++result.skipped_no_target;
      continue;
    }
    if (sentence.tokens.size() > max_len) {
      ++result.skipped_over_length;
      continue;
    }
    result.sentences.push_back(std::move(sentence));
  }
  return result;
}

std::vector<SensePair> load_sense_pairs(const std::string& path,
                                        const SenseInventory& inventory) {
  std::ifstream in = open_or_throw(path);
  std::vector<SensePair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": invalid JSON: " + e.what());
    }
    if (!rec.contains("lemma") || !rec.contains("s1") || !rec.contains("s2")) {
      throw ParseError(where + ": pair record needs 'lemma', 's1', 's2'");
    }
    SensePair pair{lowercase(rec["lemma"].get<std::string>()),
                   lowercase(rec["s1"].get<std::string>()),
                   lowercase(rec["s2"].get<std::string>())};
    try {
      pair.validate(inventory);
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

Vocabulary build_vocabulary(const std::vector<const std::vector<RawTaggedSentence>*>& corpora,
                            std::size_t min_count, const SenseInventory& inventory) {
  std::map<std::string, std::size_t> counts;
  for (const auto* corpus : corpora) {
    for (const auto& sentence : *corpus) {
      for (const auto& tok : sentence.tokens) ++counts[tok];
    }
  }
  Vocabulary vocab;
  // Inventory lemmas, their surface forms first, then each sense-tagged form,
  // are unconditionally present.
  for (const auto& lemma : inventory.lemmas()) {
    vocab.add(lemma);
    for (const auto& sense : inventory.senses(lemma)) {
      vocab.add(Vocabulary::sense_tagged_token(lemma, sense));
    }
  }
  std::vector<std::pair<std::string, std::size_t>> rest(counts.begin(), counts.end());
  std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  for (const auto& [token, count] : rest) {
    if (count >= min_count) vocab.add(token);
  }
  return vocab;
}

TaggedSentence encode_sentence(const RawTaggedSentence& raw, const Vocabulary& vocab) {
  TaggedSentence out;
  out.tokens = vocab.encode_all(raw.tokens);
  out.target_pos = raw.target_pos;
  out.lemma = raw.lemma;
  out.sense = raw.sense;
  return out;
}

std::vector<TaggedSentence> encode_corpus(const std::vector<RawTaggedSentence>& raw,
                                          const Vocabulary& vocab) {
  std::vector<TaggedSentence> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(encode_sentence(r, vocab));
  return out;
}

std::vector<std::vector<std::size_t>> batch_iter(std::size_t count, std::size_t batch_size,
                                                 Rng rng) {
  if (batch_size == 0) throw std::invalid_argument("batch_iter: batch_size must be >= 1");
  std::vector<std::size_t> order = rng.permutation(count);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < count; start += batch_size) {
    const std::size_t end = std::min(count, start + batch_size);
    batches.emplace_back(order.begin() + static_cast<long>(start),
                         order.begin() + static_cast<long>(end));
  }
  return batches;
}

void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
  nlohmann::json j;
  j["tokens"] = vocab.tokens();
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

Vocabulary load_vocabulary(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
  if (!j.contains("tokens") || !j["tokens"].is_array()) {
    throw ParseError(path + ": expected a 'tokens' array");
  }
  Vocabulary vocab;
  std::size_t index = 0;
  for (const auto& t : j["tokens"]) {
    const std::string tok = t.get<std::string>();
    if (index < 3) {
      const char* expected = index == 0 ? kBosToken : index == 1 ? kEosToken : kUnkToken;
      if (tok != expected) {
        throw ValidationError(path + ": reserved token slot " + std::to_string(index) +
                              " holds '" + tok + "'");
      }
    } else {
      vocab.add(tok);
    }
    ++index;
  }
  if (index < 3) throw ValidationError(path + ": vocabulary smaller than the reserved set");
  return vocab;
}

void save_inventory(const SenseInventory& inventory, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  for (const auto& lemma : inventory.lemmas()) {
    for (const auto& sense : inventory.senses(lemma)) {
      out << lemma << '\t' << sense << "\n";
    }
  }
}

}  // namespace pungan
