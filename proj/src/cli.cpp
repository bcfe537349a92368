#include "pungan/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "pungan/corpus.hpp"
#include "pungan/eval_metrics.hpp"
#include "pungan/trainer.hpp"

namespace fs = std::filesystem;

namespace pungan {

namespace {

bool verbose() {
  static const bool v = [] {
    const char* env = std::getenv("PUNGAN_VERBOSE");
    return env != nullptr && std::string(env) != "0" && std::string(env) != "";
  }();
  return v;
}

int map_exception(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (dynamic_cast<const PrerequisiteError*>(&e)) return kExitPrerequisite;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e)) {
    return kExitValidation;
  }
  return kExitRuntime;
}

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path)) {
    throw PrerequisiteError(std::string(what) + " not found: " + path);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << text;
}

nlohmann::json config_to_json(const TrainingConfig& c) {
  nlohmann::json j;
  j["batch_size"] = c.batch_size;
  j["lr"] = c.lr;
  j["sample_size"] = c.sample_size;
  j["gen_pretrain_epochs"] = c.gen_pretrain_epochs;
  j["disc_pretrain_epochs"] = c.disc_pretrain_epochs;
  j["gen_steps_per_round"] = c.gen_steps_per_round;
  j["disc_steps_per_round"] = c.disc_steps_per_round;
  j["adversarial_rounds"] = c.adversarial_rounds;
  j["max_len"] = c.max_len;
  j["emb_dim"] = c.emb_dim;
  j["gen_hidden"] = c.gen_hidden;
  j["disc_hidden"] = c.disc_hidden;
  j["min_count"] = c.min_count;
  j["init_range"] = c.init_range;
  j["grad_clip"] = c.grad_clip;
  j["mean_baseline"] = c.mean_baseline;
  j["disc_use_unlabeled"] = c.disc_use_unlabeled;
  j["disc_use_generated"] = c.disc_use_generated;
  j["seed"] = c.seed;
  j["checkpoint_every"] = c.checkpoint_every;
  j["log_samples"] = c.log_samples;
  j["eval_samples"] = c.eval_samples;
  return j;
}

void write_manifest(const std::string& path, const std::string& command,
                    const nlohmann::json& inputs, const nlohmann::json& outputs,
                    const nlohmann::json& config, std::uint64_t seed) {
  nlohmann::json m;
  m["tool_version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = seed;
  m["inputs"] = inputs;
  m["outputs"] = outputs;
  m["config"] = config;
  write_text(path, m.dump(2) + "\n");
}

nlohmann::json digest_entry(const std::string& path) {
  nlohmann::json j;
  j["path"] = path;
  j["fnv1a64"] = file_digest(path);
  return j;
}

// Canonical record form: surface token at the target position, sense kept as
// a field, so files round-trip through the loader.
nlohmann::json sentence_record(const RawTaggedSentence& s) {
  nlohmann::json rec;
  std::vector<std::string> tokens = s.tokens;
  if (s.sense) tokens[s.target_pos] = s.lemma;
  rec["tokens"] = tokens;
  rec["target"] = s.target_pos;
  rec["lemma"] = s.lemma;
  if (s.sense) rec["sense"] = *s.sense;
  return rec;
}

void write_corpus_jsonl(const std::string& path, const std::vector<RawTaggedSentence>& sentences) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  for (const auto& s : sentences) out << sentence_record(s).dump() << "\n";
}

struct PreparedData {
  TrainingData data;
  std::string inventory_path, vocab_path, labeled_path, unlabeled_path, pairs_path;
  bool has_unlabeled = false;
  bool has_pairs = false;
};

PreparedData load_prepared(const std::string& data_dir, std::size_t max_len) {
  PreparedData p;
  p.inventory_path = data_dir + "/inventory.tsv";
  p.vocab_path = data_dir + "/vocab.json";
  p.labeled_path = data_dir + "/labeled.jsonl";
  p.unlabeled_path = data_dir + "/unlabeled.jsonl";
  p.pairs_path = data_dir + "/pairs.jsonl";
  if (!fs::is_directory(data_dir)) {
    throw PrerequisiteError("prepared data directory not found: " + data_dir +
                            " (run prepare-data first)");
  }
  require_file(p.inventory_path, "prepared inventory");
  require_file(p.vocab_path, "prepared vocabulary");
  require_file(p.labeled_path, "prepared labeled corpus");

  p.data.inventory = load_sense_inventory(p.inventory_path);
  p.data.vocab = load_vocabulary(p.vocab_path);
  CorpusLoadResult labeled = load_tagged_corpus(p.labeled_path, p.data.inventory, max_len);
  p.data.labeled = encode_corpus(labeled.sentences, p.data.vocab);
  if (fs::exists(p.unlabeled_path)) {
    CorpusLoadResult unlabeled = load_tagged_corpus(p.unlabeled_path, p.data.inventory, max_len);
    p.data.unlabeled = encode_corpus(unlabeled.sentences, p.data.vocab);
    p.has_unlabeled = true;
  }
  if (fs::exists(p.pairs_path)) {
    p.data.pairs = load_sense_pairs(p.pairs_path, p.data.inventory);
    p.has_pairs = true;
  }
  return p;
}

void print_phase_log(const TrainingLog& log) {
  if (!verbose()) return;
  for (const auto& r : log.records) {
    std::cerr << "[pungan] " << r.phase << " round " << r.round << " gen_loss " << r.gen_loss
              << " disc_loss " << r.disc_loss << " reward_mean " << r.reward_mean << " ("
              << r.wall_ms << " ms)\n";
  }
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file for digest: " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[4096];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(hex);
}

int run_prepare_data(const PrepareDataArgs& args) {
  try {
    require_file(args.inventory_path, "sense inventory");
    require_file(args.labeled_path, "labeled corpus");
    if (args.unlabeled_path) require_file(*args.unlabeled_path, "unlabeled corpus");
    if (args.pairs_path) require_file(*args.pairs_path, "sense-pair file");
    fs::create_directories(args.out_dir);

    SenseInventory inventory = load_sense_inventory(args.inventory_path);
    CorpusLoadResult labeled = load_tagged_corpus(args.labeled_path, inventory, args.max_len);
    for (const auto& s : labeled.sentences) {
      if (!s.sense) {
        throw ValidationError(args.labeled_path + ": unlabeled record in the labeled corpus (lemma '" +
                              s.lemma + "')");
      }
    }
    CorpusLoadResult unlabeled;
    if (args.unlabeled_path) {
      unlabeled = load_tagged_corpus(*args.unlabeled_path, inventory, args.max_len);
    }
    std::vector<SensePair> pairs;
    if (args.pairs_path) pairs = load_sense_pairs(*args.pairs_path, inventory);

    Vocabulary vocab = build_vocabulary({&labeled.sentences, &unlabeled.sentences},
                                        args.min_count, inventory);

    const std::string inventory_out = args.out_dir + "/inventory.tsv";
    const std::string labeled_out = args.out_dir + "/labeled.jsonl";
    const std::string unlabeled_out = args.out_dir + "/unlabeled.jsonl";
    const std::string pairs_out = args.out_dir + "/pairs.jsonl";
    const std::string vocab_out = args.out_dir + "/vocab.json";
    save_inventory(inventory, inventory_out);
    write_corpus_jsonl(labeled_out, labeled.sentences);
    if (args.unlabeled_path) write_corpus_jsonl(unlabeled_out, unlabeled.sentences);
    if (args.pairs_path) {
      std::ofstream out(pairs_out);
      if (!out) throw ValidationError("cannot write file: " + pairs_out);
      for (const auto& p : pairs) {
        nlohmann::json rec;
        rec["lemma"] = p.lemma;
        rec["s1"] = p.s1;
        rec["s2"] = p.s2;
        out << rec.dump() << "\n";
      }
    }
    save_vocabulary(vocab, vocab_out);

    nlohmann::json inputs = nlohmann::json::array();
    inputs.push_back(digest_entry(args.inventory_path));
    inputs.push_back(digest_entry(args.labeled_path));
    if (args.unlabeled_path) inputs.push_back(digest_entry(*args.unlabeled_path));
    if (args.pairs_path) inputs.push_back(digest_entry(*args.pairs_path));
    nlohmann::json outputs = nlohmann::json::array();
    for (const std::string& f : {inventory_out, labeled_out, vocab_out}) {
      outputs.push_back(digest_entry(f));
    }
    if (args.unlabeled_path) outputs.push_back(digest_entry(unlabeled_out));
    if (args.pairs_path) outputs.push_back(digest_entry(pairs_out));
    nlohmann::json settings;
    settings["min_count"] = args.min_count;
    settings["max_len"] = args.max_len;
    write_manifest(args.out_dir + "/manifest.json", "prepare-data", inputs, outputs, settings, 0);

    std::cout << "lemmas: " << inventory.lemma_count() << "\n"
              << "labeled sentences: " << labeled.sentences.size() << "\n"
              << "unlabeled sentences: " << unlabeled.sentences.size() << "\n"
              << "sense pairs: " << pairs.size() << "\n"
              << "vocabulary size: " << vocab.size() << "\n"
              << "skipped (over length): "
              << labeled.skipped_over_length + unlabeled.skipped_over_length << "\n"
              << "skipped (no inventory lemma): " << unlabeled.skipped_no_target << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}

int run_train(const TrainArgs& args) {
  try {
    TrainingConfig config =
        args.config_path ? TrainingConfig::from_file(*args.config_path) : TrainingConfig{};
    if (args.seed) config.seed = *args.seed;
    config.validate();

    PreparedData prepared = load_prepared(args.data_dir, config.max_len);
    fs::create_directories(args.out_dir);

    const std::string gen_pre = args.out_dir + "/generator_pretrained.json";
    const std::string disc_pre = args.out_dir + "/discriminator_pretrained.json";
    const std::string gen_final = args.out_dir + "/generator_final.json";
    const std::string disc_final = args.out_dir + "/discriminator_final.json";

    nlohmann::json inputs = nlohmann::json::array();
    for (const std::string& f :
         {prepared.inventory_path, prepared.vocab_path, prepared.labeled_path}) {
      inputs.push_back(digest_entry(f));
    }
    if (prepared.has_unlabeled) inputs.push_back(digest_entry(prepared.unlabeled_path));
    if (prepared.has_pairs) inputs.push_back(digest_entry(prepared.pairs_path));

    nlohmann::json outputs = nlohmann::json::array();

    if (args.mode == "pretrain-gen") {
      PretrainGenResult result = pretrain_generator(config, prepared.data);
      print_phase_log(result.log);
      result.params.save(gen_pre);
      result.log.write_jsonl(args.out_dir + "/log_pretrain_gen.jsonl");
      outputs.push_back(digest_entry(gen_pre));
      std::cout << "pretrained generator saved to " << gen_pre << "\n";
    } else if (args.mode == "pretrain-disc") {
      require_file(gen_pre, "pretrained generator checkpoint");
      if (config.disc_use_generated && !prepared.has_pairs) {
        throw PrerequisiteError("pretrain-disc requires pairs.jsonl in the data directory");
      }
      GeneratorParams gen = GeneratorParams::load(gen_pre);
      PretrainDiscResult result = pretrain_discriminator(config, prepared.data, gen);
      print_phase_log(result.log);
      result.params.save(disc_pre);
      result.log.write_jsonl(args.out_dir + "/log_pretrain_disc.jsonl");
      outputs.push_back(digest_entry(disc_pre));
      std::cout << "pretrained discriminator saved to " << disc_pre << "\n";
    } else if (args.mode == "gan" || args.mode == "gan-frozen-disc") {
      if (!prepared.has_pairs) {
        throw PrerequisiteError("adversarial training requires pairs.jsonl in the data directory");
      }
      if (args.mode == "gan-frozen-disc") config.disc_steps_per_round = 0;
      std::size_t start_round = 0;
      GeneratorParams gen;
      DiscriminatorParams disc;
      if (args.resume_round) {
        start_round = *args.resume_round;
        const std::string gen_ckpt =
            args.out_dir + "/generator_round_" + std::to_string(start_round) + ".json";
        const std::string disc_ckpt =
            args.out_dir + "/discriminator_round_" + std::to_string(start_round) + ".json";
        require_file(gen_ckpt, "resume generator checkpoint");
        require_file(disc_ckpt, "resume discriminator checkpoint");
        gen = GeneratorParams::load(gen_ckpt);
        disc = DiscriminatorParams::load(disc_ckpt);
      } else {
        require_file(gen_pre, "pretrained generator checkpoint");
        require_file(disc_pre, "pretrained discriminator checkpoint");
        gen = GeneratorParams::load(gen_pre);
        disc = DiscriminatorParams::load(disc_pre);
      }
      TrainingLog log = adversarial_train(config, prepared.data, gen, disc, args.out_dir,
                                          start_round);
      print_phase_log(log);
      gen.save(gen_final);
      disc.save(disc_final);
      log.write_jsonl(args.out_dir + "/log_gan.jsonl");
      outputs.push_back(digest_entry(gen_final));
      outputs.push_back(digest_entry(disc_final));
      std::cout << "final checkpoints saved to " << gen_final << " and " << disc_final << "\n";
    } else {
      throw std::invalid_argument("unknown mode '" + args.mode +
                                  "' (expected pretrain-gen, pretrain-disc, gan, gan-frozen-disc)");
    }

    write_manifest(args.out_dir + "/manifest_" + args.mode + ".json", "train " + args.mode,
                   inputs, outputs, config_to_json(config), config.seed);
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}

int run_generate(const GenerateArgs& args) {
  try {
    if (args.decode != "sample" && args.decode != "greedy") {
      throw std::invalid_argument("decode must be 'sample' or 'greedy'");
    }
    require_file(args.checkpoint_path, "generator checkpoint");
    PreparedData prepared = load_prepared(args.data_dir, std::size_t(-1));
    require_file(args.pairs_path, "sense-pair file");
    std::vector<SensePair> pairs = load_sense_pairs(args.pairs_path, prepared.data.inventory);
    if (pairs.empty() && args.count > 0) {
      throw ValidationError(args.pairs_path + ": no sense pairs");
    }
    GeneratorParams gen = GeneratorParams::load(args.checkpoint_path);
    const DecodeMode mode =
        args.decode == "greedy" ? DecodeMode::kGreedy : DecodeMode::kSample;

    std::ostringstream lines;
    const Rng master(args.seed);
    for (std::size_t i = 0; i < args.count; ++i) {
      const SensePair& pair = pairs[i % pairs.size()];
      Rng rng = master.derive(i);
      GenerationTrace trace = sample_sentence(gen, pair, prepared.data.inventory,
                                              prepared.data.vocab, rng, gen.max_len, mode);
      std::string text;
      for (std::size_t t = 0; t < trace.tokens.size(); ++t) {
        if (t > 0) text += ' ';
        text += prepared.data.vocab.decode(prepared.data.vocab.surface_id(trace.tokens[t]));
      }
      lines << pair.lemma << '\t' << pair.s1 << '\t' << pair.s2 << '\t' << trace.logprob << '\t'
            << text << "\n";
    }
    if (args.out_path) {
      write_text(*args.out_path, lines.str());
    } else {
      std::cout << lines.str();
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}

int run_evaluate(const EvaluateArgs& args) {
  try {
    require_file(args.checkpoint_path, "generator checkpoint");
    PreparedData prepared = load_prepared(args.data_dir, std::size_t(-1));
    require_file(args.pairs_path, "sense-pair file");
    require_file(args.training_sample_path, "training sample");
    std::vector<SensePair> pairs = load_sense_pairs(args.pairs_path, prepared.data.inventory);
    GeneratorParams gen = GeneratorParams::load(args.checkpoint_path);
    CorpusLoadResult training_raw =
        load_tagged_corpus(args.training_sample_path, prepared.data.inventory, std::size_t(-1));
    std::vector<TaggedSentence> training =
        encode_corpus(training_raw.sentences, prepared.data.vocab);
    if (training.empty()) {
      throw ValidationError(args.training_sample_path + ": no usable sentences");
    }

    MetricReport report;
    if (args.self_comparison) {
      std::vector<std::vector<int>> ids;
      std::vector<std::vector<std::string>> text;
      for (const auto& s : training) {
        std::vector<int> surface;
        for (int id : s.tokens) surface.push_back(prepared.data.vocab.surface_id(id));
        text.push_back(prepared.data.vocab.decode_all(surface));
        ids.push_back(std::move(surface));
      }
      report.unusualness = unusualness(gen, ids, ids);
      report.dist1 = distinct_n(text, 1);
      report.dist2 = distinct_n(text, 2);
      report.sentence_count = ids.size();
    } else {
      std::optional<DiscriminatorParams> disc;
      if (args.disc_checkpoint_path) {
        require_file(*args.disc_checkpoint_path, "discriminator checkpoint");
        disc = DiscriminatorParams::load(*args.disc_checkpoint_path);
      }
      EvalConfig eval_config;
      eval_config.sample_count = args.count;
      eval_config.seed = args.seed;
      eval_config.max_len = gen.max_len;
      report = evaluate_run(gen, disc ? &*disc : nullptr, pairs, training,
                            prepared.data.inventory, prepared.data.vocab, eval_config);
    }

    const std::string text = report.to_json().dump(2) + "\n";
    if (args.out_path) {
      write_text(*args.out_path, text);
    } else {
      std::cout << text;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return map_exception(e);
  }
}

}  // namespace pungan
