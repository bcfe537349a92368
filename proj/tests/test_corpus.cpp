#include <doctest.h>

#include <set>

#include "pungan/corpus.hpp"
#include "test_helpers.hpp"

using namespace pungan;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("sense inventory parses a two-line file") {
  TempDir tmp("inventory");
  write_file(tmp.file("senses.tsv"), "bank\triver\nbank\tfinance\n");
  SenseInventory inv = load_sense_inventory(tmp.file("senses.tsv"));
  CHECK(inv.lemma_count() == 1);
  CHECK(inv.sense_count("bank") == 2);
  CHECK(inv.senses("bank")[0] == "river");
  CHECK(inv.senses("bank")[1] == "finance");
  CHECK(inv.sense_index("bank", "finance") == 1);
}

TEST_CASE("sense inventory accepts an empty file") {
  TempDir tmp("inventory_empty");
  write_file(tmp.file("senses.tsv"), "");
  SenseInventory inv = load_sense_inventory(tmp.file("senses.tsv"));
  CHECK(inv.lemma_count() == 0);
}

TEST_CASE("sense inventory rejects duplicates and malformed lines") {
  TempDir tmp("inventory_bad");
  write_file(tmp.file("dup.tsv"), "bank\triver\nbank\triver\n");
  CHECK_THROWS_AS(load_sense_inventory(tmp.file("dup.tsv")), ValidationError);

  write_file(tmp.file("bad.tsv"), "bank river no tab\n");
  CHECK_THROWS_WITH_AS(load_sense_inventory(tmp.file("bad.tsv")),
                       doctest::Contains(":1:"), ParseError);
}

TEST_CASE("tagged corpus rewrites the target to a sense-tagged token") {
  TempDir tmp("corpus");
  write_file(tmp.file("senses.tsv"), "interest\tcuriosity\ninterest\tprofits\n");
  SenseInventory inv = load_sense_inventory(tmp.file("senses.tsv"));
  write_file(tmp.file("c.jsonl"),
             R"({"tokens":["i","lost","interest"],"target":2,"lemma":"interest","sense":"curiosity"})"
             "\n");
  CorpusLoadResult result = load_tagged_corpus(tmp.file("c.jsonl"), inv);
  REQUIRE(result.sentences.size() == 1);
  const RawTaggedSentence& s = result.sentences[0];
  CHECK(s.tokens[2] == "interest#curiosity");
  CHECK(s.target_pos == 2);
  CHECK(s.lemma == "interest");
  REQUIRE(s.sense.has_value());
  CHECK(*s.sense == "curiosity");
}

TEST_CASE("tagged corpus keeps unlabeled records unlabeled") {
  TempDir tmp("corpus_unlabeled");
  write_file(tmp.file("senses.tsv"), "bank\triver\nbank\tfinance\n");
  SenseInventory inv = load_sense_inventory(tmp.file("senses.tsv"));
  write_file(tmp.file("u.jsonl"),
             R"({"tokens":["the","bank","closed"],"target":1,"lemma":"bank"})"
             "\n"
             R"({"tokens":["no","annotation","bank","here"]})"
             "\n"
             R"({"tokens":["nothing","relevant","here"]})"
             "\n");
  CorpusLoadResult result = load_tagged_corpus(tmp.file("u.jsonl"), inv);
  REQUIRE(result.sentences.size() == 2);
  CHECK_FALSE(result.sentences[0].sense.has_value());
  CHECK(result.sentences[1].target_pos == 2);  // auto-detected inventory lemma
  CHECK(result.sentences[1].lemma == "bank");
  CHECK(result.skipped_no_target == 1);
}

TEST_CASE("tagged corpus reports validation problems with the record location") {
  TempDir tmp("corpus_bad");
  write_file(tmp.file("senses.tsv"), "bank\triver\n");
  SenseInventory inv = load_sense_inventory(tmp.file("senses.tsv"));

  write_file(tmp.file("range.jsonl"),
             R"({"tokens":["a","bank","c"],"target":7,"lemma":"bank","sense":"river"})"
             "\n");
  CHECK_THROWS_WITH_AS(load_tagged_corpus(tmp.file("range.jsonl"), inv),
                       doctest::Contains(":1:"), ValidationError);

  write_file(tmp.file("lemma.jsonl"),
             R"({"tokens":["the","shore"],"target":1,"lemma":"shore","sense":"river"})"
             "\n");
  CHECK_THROWS_AS(load_tagged_corpus(tmp.file("lemma.jsonl"), inv), ValidationError);

  write_file(tmp.file("json.jsonl"), "{not json\n");
  CHECK_THROWS_AS(load_tagged_corpus(tmp.file("json.jsonl"), inv), ParseError);

  write_file(tmp.file("sense.jsonl"),
             R"({"tokens":["the","bank"],"target":1,"lemma":"bank","sense":"orchestra"})"
             "\n");
  CHECK_THROWS_AS(load_tagged_corpus(tmp.file("sense.jsonl"), inv), ValidationError);
}

TEST_CASE("tagged corpus drops sentences over the length cap") {
  TempDir tmp("corpus_cap");
  write_file(tmp.file("senses.tsv"), "bank\triver\n");
  SenseInventory inv = load_sense_inventory(tmp.file("senses.tsv"));
  write_file(tmp.file("c.jsonl"),
             R"({"tokens":["a","b","bank","d","e"],"target":2,"lemma":"bank","sense":"river"})"
             "\n");
  CorpusLoadResult ok = load_tagged_corpus(tmp.file("c.jsonl"), inv, 5);
  CHECK(ok.sentences.size() == 1);
  CorpusLoadResult capped = load_tagged_corpus(tmp.file("c.jsonl"), inv, 4);
  CHECK(capped.sentences.empty());
  CHECK(capped.skipped_over_length == 1);
}

TEST_CASE("vocabulary reserves fixed ids and stays contiguous") {
  testutil::ToySetup setup = testutil::make_toy_setup(2);
  CHECK(setup.vocab.id_of(kBosToken) == kBosId);
  CHECK(setup.vocab.id_of(kEosToken) == kEosId);
  CHECK(setup.vocab.id_of(kUnkToken) == kUnkId);
  std::set<int> ids;
  for (std::size_t i = 0; i < setup.vocab.size(); ++i) {
    ids.insert(setup.vocab.id_of(setup.vocab.decode(static_cast<int>(i))));
  }
  CHECK(ids.size() == setup.vocab.size());
  CHECK(*ids.begin() == 0);
  CHECK(*ids.rbegin() == static_cast<int>(setup.vocab.size()) - 1);
}

TEST_CASE("build_vocabulary honors min_count but always keeps inventory tokens") {
  SenseInventory inv;
  inv.add("bank", "river");
  inv.add("bank", "finance");

  RawTaggedSentence s1;
  s1.tokens = {"the", "old", "bank#river"};
  s1.target_pos = 2;
  s1.lemma = "bank";
  s1.sense = "river";
  RawTaggedSentence s2;
  s2.tokens = {"the", "bank#finance"};
  s2.target_pos = 1;
  s2.lemma = "bank";
  s2.sense = "finance";
  std::vector<RawTaggedSentence> corpus = {s1, s2};

  Vocabulary v1 = build_vocabulary({&corpus}, 1, inv);
  CHECK(v1.contains("the"));
  CHECK(v1.contains("old"));
  CHECK(v1.contains("bank"));
  CHECK(v1.contains("bank#river"));
  CHECK(v1.contains("bank#finance"));

  // "old" occurs once; with min_count 2 it must fall back to <unk>, while the
  // inventory lemma's forms survive any cutoff.
  Vocabulary v2 = build_vocabulary({&corpus}, 2, inv);
  CHECK_FALSE(v2.contains("old"));
  CHECK(v2.encode("old") == kUnkId);
  CHECK(v2.contains("bank"));
  CHECK(v2.contains("bank#river"));

  Vocabulary v5 = build_vocabulary({&corpus}, 5, inv);
  CHECK(v5.contains("bank#river"));
  CHECK(v5.contains("bank#finance"));
}

TEST_CASE("encode/decode round-trips with <unk> substitutions only for OOV tokens") {
  testutil::ToySetup setup = testutil::make_toy_setup(3);
  std::vector<std::string> tokens = {"w0", "mystery", "bank", "w2"};
  std::vector<int> ids = setup.vocab.encode_all(tokens);
  std::vector<std::string> back = setup.vocab.decode_all(ids);
  CHECK(back[0] == "w0");
  CHECK(back[1] == kUnkToken);
  CHECK(back[2] == "bank");
  CHECK(back[3] == "w2");
}

TEST_CASE("surface_id maps sense-tagged ids to the lemma") {
  testutil::ToySetup setup = testutil::make_toy_setup(1);
  const int tagged = setup.vocab.id_of("bank#river");
  CHECK(setup.vocab.surface_id(tagged) == setup.vocab.id_of("bank"));
  const int plain = setup.vocab.id_of("w0");
  CHECK(setup.vocab.surface_id(plain) == plain);
}

TEST_CASE("vocabulary save/load round-trip") {
  TempDir tmp("vocab");
  testutil::ToySetup setup = testutil::make_toy_setup(4);
  save_vocabulary(setup.vocab, tmp.file("vocab.json"));
  Vocabulary loaded = load_vocabulary(tmp.file("vocab.json"));
  REQUIRE(loaded.size() == setup.vocab.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded.decode(static_cast<int>(i)) == setup.vocab.decode(static_cast<int>(i)));
  }
}

TEST_CASE("batch_iter splits 5 sentences into 2,2,1") {
  auto batches = batch_iter(5, 2, Rng(42));
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 2);
  CHECK(batches[1].size() == 2);
  CHECK(batches[2].size() == 1);
  std::set<std::size_t> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  CHECK(seen.size() == 5);
}

TEST_CASE("batch_iter is deterministic per seed") {
  auto a = batch_iter(10, 3, Rng(7));
  auto b = batch_iter(10, 3, Rng(7));
  CHECK(a == b);
}

TEST_CASE("batch_iter orders differ across seed pairs") {
  // 100 fixed seed pairs on 10 sentences; identical shuffles would need a
  // ~1/10! coincidence per pair.
  std::size_t differing = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto a = batch_iter(10, 10, Rng(s));
    auto b = batch_iter(10, 10, Rng(s + 1000));
    if (a != b) ++differing;
  }
  CHECK(differing >= 99);
}

TEST_CASE("sense pair file loads and validates") {
  TempDir tmp("pairs");
  write_file(tmp.file("senses.tsv"), "bank\triver\nbank\tfinance\n");
  SenseInventory inv = load_sense_inventory(tmp.file("senses.tsv"));
  write_file(tmp.file("pairs.jsonl"), R"({"lemma":"bank","s1":"river","s2":"finance"})"
                                      "\n");
  auto pairs = load_sense_pairs(tmp.file("pairs.jsonl"), inv);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].lemma == "bank");

  write_file(tmp.file("bad.jsonl"), R"({"lemma":"bank","s1":"river","s2":"river"})"
                                    "\n");
  CHECK_THROWS_AS(load_sense_pairs(tmp.file("bad.jsonl"), inv), ValidationError);
  write_file(tmp.file("unknown.jsonl"), R"({"lemma":"bank","s1":"river","s2":"orchestra"})"
                                        "\n");
  CHECK_THROWS_WITH_AS(load_sense_pairs(tmp.file("unknown.jsonl"), inv),
                       doctest::Contains("orchestra"), ValidationError);
}

TEST_CASE("encoded corpus sentences satisfy their invariants") {
  TempDir tmp("encode");
  write_file(tmp.file("senses.tsv"), "bank\triver\nbank\tfinance\n");
  SenseInventory inv = load_sense_inventory(tmp.file("senses.tsv"));
  write_file(tmp.file("c.jsonl"),
             R"({"tokens":["the","bank","burst"],"target":1,"lemma":"bank","sense":"river"})"
             "\n"
             R"({"tokens":["a","bank","loan"],"target":1,"lemma":"bank","sense":"finance"})"
             "\n");
  CorpusLoadResult raw = load_tagged_corpus(tmp.file("c.jsonl"), inv);
  Vocabulary vocab = build_vocabulary({&raw.sentences}, 1, inv);
  auto corpus = encode_corpus(raw.sentences, vocab);
  for (const auto& s : corpus) {
    CHECK(s.target_pos < s.tokens.size());
    CHECK(vocab.is_sense_tagged(s.tokens[s.target_pos]));
    CHECK(vocab.surface_id(s.tokens[s.target_pos]) == vocab.id_of(s.lemma));
    REQUIRE(s.sense.has_value());
    CHECK(inv.has_sense(s.lemma, *s.sense));
  }
}
