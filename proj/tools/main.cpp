#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pungan/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pungan: adversarial pun generation with a word-sense discriminator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pungan::kToolVersion);

  // prepare-data
  pungan::PrepareDataArgs prepare;
  std::string prepare_unlabeled, prepare_pairs;
  auto* cmd_prepare = app.add_subcommand(
      "prepare-data", "Validate corpora, build the vocabulary, write a prepared dataset");
  cmd_prepare->add_option("--inventory", prepare.inventory_path, "Sense inventory TSV")
      ->required();
  cmd_prepare->add_option("--labeled", prepare.labeled_path, "Sense-labeled corpus JSONL")
      ->required();
  cmd_prepare->add_option("--unlabeled", prepare_unlabeled, "Unlabeled corpus JSONL");
  cmd_prepare->add_option("--pairs", prepare_pairs, "Sense-pair JSONL");
  cmd_prepare->add_option("--out-dir", prepare.out_dir, "Output directory")->required();
  cmd_prepare->add_option("--min-count", prepare.min_count, "Vocabulary frequency cutoff");
  cmd_prepare->add_option("--max-len", prepare.max_len, "Sentence length cap at ingestion");

  // train
  pungan::TrainArgs train;
  std::string train_config;
  std::uint64_t train_seed = 0;
  std::size_t train_resume = 0;
  auto* cmd_train = app.add_subcommand("train", "Run one training stage");
  cmd_train->add_option("--data-dir", train.data_dir, "Prepared dataset directory")->required();
  cmd_train->add_option("--out-dir", train.out_dir, "Artifact directory")->required();
  cmd_train
      ->add_option("--mode", train.mode,
                   "pretrain-gen | pretrain-disc | gan | gan-frozen-disc")
      ->required();
  auto* config_opt = cmd_train->add_option("--config", train_config, "Training config file");
  auto* seed_opt = cmd_train->add_option("--seed", train_seed, "Seed override");
  auto* resume_opt =
      cmd_train->add_option("--resume-round", train_resume,
                            "Resume the gan modes from this round's checkpoints");

  // generate
  pungan::GenerateArgs generate;
  std::string generate_out;
  auto* cmd_generate = app.add_subcommand("generate", "Sample sentences from a checkpoint");
  cmd_generate->add_option("--data-dir", generate.data_dir, "Prepared dataset directory")
      ->required();
  cmd_generate->add_option("--checkpoint", generate.checkpoint_path, "Generator checkpoint")
      ->required();
  cmd_generate->add_option("--pairs", generate.pairs_path, "Sense-pair JSONL")->required();
  cmd_generate->add_option("--count", generate.count, "Number of sentences");
  cmd_generate->add_option("--decode", generate.decode, "sample | greedy");
  cmd_generate->add_option("--seed", generate.seed, "Sampling seed");
  auto* generate_out_opt = cmd_generate->add_option("--out", generate_out, "Output file");

  // evaluate
  pungan::EvaluateArgs evaluate;
  std::string evaluate_disc, evaluate_out;
  auto* cmd_evaluate = app.add_subcommand("evaluate", "Compute the automatic metric report");
  cmd_evaluate->add_option("--data-dir", evaluate.data_dir, "Prepared dataset directory")
      ->required();
  cmd_evaluate->add_option("--checkpoint", evaluate.checkpoint_path, "Generator checkpoint")
      ->required();
  cmd_evaluate->add_option("--pairs", evaluate.pairs_path, "Sense-pair JSONL")->required();
  cmd_evaluate
      ->add_option("--training-sample", evaluate.training_sample_path,
                   "Training sentences JSONL for the unusualness baseline")
      ->required();
  auto* disc_opt = cmd_evaluate->add_option("--disc", evaluate_disc,
                                            "Discriminator checkpoint (adds mean_reward)");
  cmd_evaluate->add_option("--count", evaluate.count, "Number of sampled sentences");
  cmd_evaluate->add_option("--seed", evaluate.seed, "Sampling seed");
  cmd_evaluate->add_flag("--self-comparison", evaluate.self_comparison,
                         "Score the training sample against itself");
  auto* evaluate_out_opt = cmd_evaluate->add_option("--out", evaluate_out, "Output file");

  CLI11_PARSE(app, argc, argv);

  if (cmd_prepare->parsed()) {
    if (!prepare_unlabeled.empty()) prepare.unlabeled_path = prepare_unlabeled;
    if (!prepare_pairs.empty()) prepare.pairs_path = prepare_pairs;
    return pungan::run_prepare_data(prepare);
  }
  if (cmd_train->parsed()) {
    if (config_opt->count() > 0) train.config_path = train_config;
    if (seed_opt->count() > 0) train.seed = train_seed;
    if (resume_opt->count() > 0) train.resume_round = train_resume;
    return pungan::run_train(train);
  }
  if (cmd_generate->parsed()) {
    if (generate_out_opt->count() > 0) generate.out_path = generate_out;
    return pungan::run_generate(generate);
  }
  if (cmd_evaluate->parsed()) {
    if (disc_opt->count() > 0) evaluate.disc_checkpoint_path = evaluate_disc;
    if (evaluate_out_opt->count() > 0) evaluate.out_path = evaluate_out;
    return pungan::run_evaluate(evaluate);
  }
  return 1;
}
