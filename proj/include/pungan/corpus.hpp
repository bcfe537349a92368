#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pungan/errors.hpp"
#include "pungan/rng.hpp"

namespace pungan {

// Separator between a lemma and a sense id in sense-tagged tokens
// ("bank#river"). Plain corpus tokens may not contain it.
inline constexpr char kSenseSeparator = '#';

inline constexpr const char* kBosToken = "<bos>";
inline constexpr const char* kEosToken = "<eos>";
inline constexpr const char* kUnkToken = "<unk>";
inline constexpr int kBosId = 0;
inline constexpr int kEosId = 1;
inline constexpr int kUnkId = 2;

// Per-lemma ordered sense lists. File order is canonical and stable.
class SenseInventory {
 public:
  void add(const std::string& lemma, const std::string& sense);

  bool has_lemma(const std::string& lemma) const;
  bool has_sense(const std::string& lemma, const std::string& sense) const;
  // Number of senses k_w; throws ValidationError for unknown lemmas.
  std::size_t sense_count(const std::string& lemma) const;
  // Position of `sense` in the lemma's ordered list.
  std::size_t sense_index(const std::string& lemma, const std::string& sense) const;
  const std::vector<std::string>& senses(const std::string& lemma) const;
  // Lemmas in first-appearance order.
  const std::vector<std::string>& lemmas() const { return order_; }
  std::size_t lemma_count() const { return order_.size(); }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::vector<std::string>> senses_;
};

struct SensePair {
  std::string lemma;
  std::string s1;
  std::string s2;

  // Throws ValidationError unless s1 != s2 and both senses belong to `lemma`.
  void validate(const SenseInventory& inventory) const;
};

// A sentence before vocabulary encoding: lowercased token strings, with the
// sense-annotated position already rewritten to lemma#sense for labeled data.
struct RawTaggedSentence {
  std::vector<std::string> tokens;
  std::size_t target_pos = 0;
  std::string lemma;
  std::optional<std::string> sense;
};

// Encoded form used everywhere downstream.
struct TaggedSentence {
  std::vector<int> tokens;
  std::size_t target_pos = 0;
  std::string lemma;
  std::optional<std::string> sense;

  bool labeled() const { return sense.has_value(); }
};

class Vocabulary {
 public:
  Vocabulary();

  // Id of an existing token, or kUnkId.
  int encode(const std::string& token) const;
  // Id of an existing token; throws ValidationError if absent.
  int id_of(const std::string& token) const;
  bool contains(const std::string& token) const;
  const std::string& decode(int id) const;
  std::size_t size() const { return tokens_.size(); }

  // Sense-tagged ids map to their lemma's surface id (or <unk> if the surface
  // form is absent); other ids map to themselves.
  int surface_id(int id) const;
  static std::string sense_tagged_token(const std::string& lemma, const std::string& sense);
  bool is_sense_tagged(int id) const;

  std::vector<int> encode_all(const std::vector<std::string>& tokens) const;
  std::vector<std::string> decode_all(const std::vector<int>& ids) const;

  // Appends a token; internal to building and deserialization.
  int add(const std::string& token);
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::map<std::string, int> ids_;
};

struct CorpusLoadResult {
  std::vector<RawTaggedSentence> sentences;
  std::size_t skipped_over_length = 0;  // longer than max_len
  std::size_t skipped_no_target = 0;    // unlabeled with no inventory lemma in the text
};

// TSV loader: one "lemma<TAB>sense" per line. Malformed lines raise
// ParseError with the line number; duplicate (lemma, sense) rows raise
// ValidationError.
SenseInventory load_sense_inventory(const std::string& path);

// JSONL loader for labeled and unlabeled corpora. Records carry
//   tokens: [string...], target: int, lemma: string, sense: string (optional)
// Unlabeled records may omit target/lemma, in which case the first token that
// matches an inventory lemma is used; records with no such token are dropped
// (counted in the result). Labeled records are validated against the
// inventory and their target token is rewritten to lemma#sense.
CorpusLoadResult load_tagged_corpus(const std::string& path, const SenseInventory& inventory,
                                    std::size_t max_len = 20);

// JSONL loader for sense pairs: {lemma, s1, s2} per line, validated.
std::vector<SensePair> load_sense_pairs(const std::string& path, const SenseInventory& inventory);

// Frequency-filtered vocabulary over the given corpora. All sense-tagged
// tokens of inventory lemmas, and the lemmas' surface forms, are always
// included; other tokens must occur at least min_count times.
Vocabulary build_vocabulary(const std::vector<const std::vector<RawTaggedSentence>*>& corpora,
                            std::size_t min_count, const SenseInventory& inventory);

TaggedSentence encode_sentence(const RawTaggedSentence& raw, const Vocabulary& vocab);
std::vector<TaggedSentence> encode_corpus(const std::vector<RawTaggedSentence>& raw,
                                          const Vocabulary& vocab);

// Seeded shuffled index batches; the final partial batch is emitted.
std::vector<std::vector<std::size_t>> batch_iter(std::size_t count, std::size_t batch_size,
                                                 Rng rng);

// Serialization helpers for prepared datasets.
void save_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary(const std::string& path);
void save_inventory(const SenseInventory& inventory, const std::string& path);

}  // namespace pungan
