#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crowdalloc/allocation.hpp"
#include "crowdalloc/analytics.hpp"
#include "crowdalloc/corpus.hpp"
#include "crowdalloc/demo.hpp"
#include "crowdalloc/difficulty.hpp"
#include "crowdalloc/evaluation.hpp"
#include "crowdalloc/sarcasm.hpp"
#include "crowdalloc/simulation.hpp"

namespace fs = std::filesystem;
using namespace crowdalloc;

namespace {

constexpr uint64_t kDefaultSeed = 42;

// Flags every subcommand accepts; the ones a subcommand has no use for are
// accepted and ignored.
struct CommonOpts {
  std::optional<uint64_t> seed;
  int runs = 5;
  std::string policy = "trad5";
  double price_per_task = 0.05;
  std::string tree_file;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool out_required = true) {
  cmd->add_option("--seed", opts.seed,
                  "Master RNG seed (default 42, echoed in report headers)");
  cmd->add_option("--runs", opts.runs, "Model runs to average over")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--policy", opts.policy,
                  "Comma-separated policies: tradK|sdt|ddt1|ddt2");
  cmd->add_option("--price-per-task", opts.price_per_task,
                  "Price per completed task")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--tree", opts.tree_file, "Decision tree JSON file");
  auto* out = cmd->add_option("--out", opts.out, "Output target");
  if (out_required) out->required();
}

uint64_t effective_seed(const CommonOpts& opts) {
  return opts.seed.value_or(kDefaultSeed);
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << content;
}

struct PipelineOpts {
  std::string tweets_file;
  std::string model_file;
  std::string clues_file;
  std::string lexicon_file;
  std::optional<double> tau;
  double prevalence = kDefaultSarcasmPrevalence;
};

MentionLexicon mention_lexicon(const PipelineOpts& opts) {
  return opts.lexicon_file.empty() ? default_mention_lexicon()
                                   : load_mention_lexicon(opts.lexicon_file);
}

ClueConfig clue_config(const PipelineOpts& opts) {
  if (!opts.clues_file.empty()) return load_clue_config(opts.clues_file);
  ClueConfig cfg = default_clue_config();
  if (!opts.lexicon_file.empty()) {
    // custom candidate patterns replace the all-caps exclusions too
    cfg.allcaps_exclude.clear();
    for (const auto& [_, patterns] : mention_lexicon(opts))
      for (const std::string& p : patterns) cfg.allcaps_exclude.push_back(p);
  }
  return cfg;
}

Corpus load_pipeline_corpus(const PipelineOpts& opts,
                            const std::string& labels_file) {
  return load_corpus(opts.tweets_file,
                     labels_file.empty() ? std::nullopt
                                         : std::optional<fs::path>(labels_file),
                     mention_lexicon(opts));
}

SarcasmModel resolve_model(const PipelineOpts& opts, const Corpus& corpus,
                           const ClueConfig& clues) {
  if (!opts.model_file.empty()) return load_model(opts.model_file);
  std::vector<std::pair<FeatureVector, bool>> training;
  for (const Tweet& tweet : corpus.tweets)
    if (tweet.gold_sarcastic)
      training.emplace_back(extract_features(tweet.text, clues),
                            *tweet.gold_sarcastic);
  if (training.empty())
    throw Error(
        "no sarcasm model: pass --model or provide gold_sarcastic flags");
  return train(training);
}

double resolve_tau(const PipelineOpts& opts, const Corpus& corpus,
                   const SarcasmModel& model, const ClueConfig& clues) {
  if (opts.tau) return *opts.tau;
  std::vector<double> scores;
  scores.reserve(corpus.tweets.size());
  for (const Tweet& tweet : corpus.tweets)
    scores.push_back(score(model, extract_features(tweet.text, clues)));
  ThresholdResult result = calibrate_threshold(scores, opts.prevalence);
  if (result.degenerate)
    std::cerr << "warning: degenerate score distribution, tau = " << result.tau
              << "\n";
  return result.tau;
}

DecisionTree resolve_tree(const CommonOpts& common, const PipelineOpts& opts,
                          const Corpus& corpus, const SarcasmModel& model,
                          const ClueConfig& clues) {
  if (!common.tree_file.empty()) return DecisionTree::from_file(common.tree_file);
  return default_tree(resolve_tau(opts, corpus, model, clues));
}

int cmd_train_sarcasm(const CommonOpts& common, const PipelineOpts& pipeline,
                      double alpha) {
  Corpus corpus = load_pipeline_corpus(pipeline, "");
  ClueConfig clues = clue_config(pipeline);
  std::vector<std::pair<FeatureVector, bool>> training;
  for (const Tweet& tweet : corpus.tweets)
    if (tweet.gold_sarcastic)
      training.emplace_back(extract_features(tweet.text, clues),
                            *tweet.gold_sarcastic);
  if (training.empty())
    throw Error("no tweets carry a gold_sarcastic flag; nothing to train on");
  SarcasmModel model = train(training, alpha);
  save_model(model, common.out);
  std::cout << "trained on " << training.size() << " tweets -> " << common.out
            << "\n";
  return 0;
}

int cmd_score(const CommonOpts& common, const PipelineOpts& pipeline) {
  Corpus corpus = load_pipeline_corpus(pipeline, "");
  ClueConfig clues = clue_config(pipeline);
  SarcasmModel model = resolve_model(pipeline, corpus, clues);
  std::ostringstream csv;
  csv << "tweet_id,score\n";
  char buf[64];
  for (const Tweet& tweet : corpus.tweets) {
    snprintf(buf, sizeof buf, ",%.12g\n",
             score(model, extract_features(tweet.text, clues)));
    csv << tweet.id << buf;
  }
  write_file(common.out, csv.str());
  return 0;
}

int cmd_classify(const CommonOpts& common, const PipelineOpts& pipeline) {
  Corpus corpus = load_pipeline_corpus(pipeline, "");
  ClueConfig clues = clue_config(pipeline);
  SarcasmModel model = resolve_model(pipeline, corpus, clues);
  DecisionTree tree = resolve_tree(common, pipeline, corpus, model, clues);
  std::ostringstream csv;
  csv << "tweet_id,class\n";
  for (const Tweet& tweet : corpus.tweets)
    csv << tweet.id << ","
        << to_string(tree.classify(derive_meta(tweet, model, clues))) << "\n";
  write_file(common.out, csv.str());
  return 0;
}

struct ExperimentCliOpts {
  std::string labels_file;  // replay only
  std::string config_file;
  std::vector<std::string> policy_configs;
  std::string accuracy = "0.9,0.8,0.7,0.6";
  double error_split = 0.5;
  int threads = 1;
  std::string outcomes_dir;
  std::string scope = "whole";
};

// Experiment config document; any field a flag was given for keeps the
// flag's value.
void merge_config_file(const CLI::App* cmd, CommonOpts& common,
                       PipelineOpts& pipeline, ExperimentCliOpts& cli) {
  std::ifstream in(cli.config_file);
  if (!in) throw Error("cannot open config file: " + cli.config_file);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(cli.config_file + ": " + e.what());
  }
  auto flag_absent = [&](const std::string& flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return !opt || opt->count() == 0;
  };
  auto merge_string = [&](const char* key, const std::string& flag,
                          std::string& out) {
    if (doc.contains(key) && flag_absent(flag))
      out = doc.at(key).get<std::string>();
  };
  merge_string("tweets", "--tweets", pipeline.tweets_file);
  merge_string("labels", "--labels", cli.labels_file);
  merge_string("model", "--model", pipeline.model_file);
  merge_string("clues", "--clues", pipeline.clues_file);
  merge_string("lexicon", "--lexicon", pipeline.lexicon_file);
  merge_string("tree", "--tree", common.tree_file);
  merge_string("out", "--out", common.out);
  merge_string("outcomes", "--outcomes", cli.outcomes_dir);
  merge_string("scope", "--scope", cli.scope);
  if (doc.contains("tau") && flag_absent("--tau"))
    pipeline.tau = doc.at("tau").get<double>();
  if (doc.contains("prevalence") && flag_absent("--prevalence"))
    pipeline.prevalence = doc.at("prevalence").get<double>();
  if (doc.contains("runs") && flag_absent("--runs"))
    common.runs = doc.at("runs").get<int>();
  if (doc.contains("seed") && flag_absent("--seed"))
    common.seed = doc.at("seed").get<uint64_t>();
  if (doc.contains("price_per_task") && flag_absent("--price-per-task"))
    common.price_per_task = doc.at("price_per_task").get<double>();
  if (doc.contains("threads") && flag_absent("--threads"))
    cli.threads = doc.at("threads").get<int>();
  if (doc.contains("error_split") && flag_absent("--error-split"))
    cli.error_split = doc.at("error_split").get<double>();
  if (doc.contains("policies") && flag_absent("--policy")) {
    std::string joined;
    for (const auto& name : doc.at("policies")) {
      if (!joined.empty()) joined += ",";
      joined += name.get<std::string>();
    }
    common.policy = joined;
  }
  if (doc.contains("policy_configs") && flag_absent("--policy-config"))
    cli.policy_configs = doc.at("policy_configs").get<std::vector<std::string>>();
  if (doc.contains("accuracy") && flag_absent("--accuracy")) {
    if (doc.at("accuracy").is_array()) {
      std::string joined;
      for (const auto& a : doc.at("accuracy")) {
        if (!joined.empty()) joined += ",";
        joined += std::to_string(a.get<double>());
      }
      cli.accuracy = joined;
    } else {
      cli.accuracy = doc.at("accuracy").get<std::string>();
    }
  }
}

int cmd_experiment(const CLI::App* cmd, CommonOpts common,
                   PipelineOpts pipeline, ExperimentCliOpts cli,
                   SourceMode mode) {
  if (!cli.config_file.empty()) merge_config_file(cmd, common, pipeline, cli);
  if (pipeline.tweets_file.empty())
    throw Error("no tweets file: pass --tweets or a config document");
  if (common.out.empty())
    throw Error("no output target: pass --out or a config document");
  if (mode == SourceMode::Replay && cli.labels_file.empty())
    throw Error("replay needs --labels or a config document");
  Corpus corpus = load_pipeline_corpus(pipeline, cli.labels_file);
  ClueConfig clues = clue_config(pipeline);
  SarcasmModel model = resolve_model(pipeline, corpus, clues);
  DecisionTree tree = resolve_tree(common, pipeline, corpus, model, clues);
  ClassMap classes = classify_corpus(corpus, tree, model);

  ExperimentConfig config;
  for (const std::string& name : split_commas(common.policy))
    config.policies.push_back(policy_table(name));
  for (const std::string& file : cli.policy_configs)
    config.policies.push_back(AllocationPolicy::from_file(file));
  config.runs = common.runs;
  config.seed = effective_seed(common);
  config.price_per_task = common.price_per_task;
  config.threads = cli.threads;
  config.mode = mode;
  if (cli.scope == "whole")
    config.scope = RunOptions::SecondRoundScope::WholeTweet;
  else if (cli.scope == "disputed")
    config.scope = RunOptions::SecondRoundScope::DisputedOnly;
  else
    throw Error("unknown --scope '" + cli.scope + "' (whole|disputed)");

  auto accuracies = split_commas(cli.accuracy);
  if (accuracies.size() != 4)
    throw Error("--accuracy needs 4 comma-separated values (VE,E,M,H)");
  for (size_t i = 0; i < 4; ++i) {
    try {
      config.worker_model.accuracy[i] = std::stod(accuracies[i]);
    } catch (const std::exception&) {
      throw Error("--accuracy: '" + accuracies[i] + "' is not a number");
    }
  }
  config.worker_model.error_weight_first = cli.error_split;

  std::vector<AllocationOutcome> outcomes;
  EvalReport report = run_experiment(
      config, corpus, classes, cli.outcomes_dir.empty() ? nullptr : &outcomes);
  write_file(common.out, report.to_csv());

  if (!cli.outcomes_dir.empty()) {
    fs::create_directories(cli.outcomes_dir);
    size_t i = 0;
    for (const AllocationPolicy& policy : config.policies)
      for (int run = 0; run < config.runs; ++run)
        save_outcomes(outcomes.at(i++),
                      fs::path(cli.outcomes_dir) /
                          (policy.name + "-run" + std::to_string(run) +
                           ".jsonl"));
  }

  printf("# seed=%llu runs=%d tweets=%zu\n",
         static_cast<unsigned long long>(config.seed), config.runs,
         corpus.tweets.size());
  printf("%-10s %12s %10s %8s %10s\n", "policy", "mean_tasks", "budget",
         "kappa", "agreement");
  for (const AllocationPolicy& policy : config.policies) {
    const EvalRow* mean = report.mean_row(policy.name);
    if (!mean) continue;
    printf("%-10s %12.1f %10.2f %8.4f %10.4f\n", policy.name.c_str(),
           mean->total_tasks, mean->budget, mean->kappa_pooled,
           mean->agreement);
  }
  return 0;
}

int cmd_curves(const CommonOpts& common, const std::string& schemes_flag,
               int grid) {
  if (grid < 2) throw Error("--grid needs at least 2 points");
  std::vector<Scheme> schemes;
  for (const std::string& name : split_commas(schemes_flag))
    schemes.push_back(Scheme::from_name(name));
  std::vector<double> p_grid;
  p_grid.reserve(grid);
  for (int i = 0; i < grid; ++i)
    p_grid.push_back(static_cast<double>(i) / static_cast<double>(grid - 1));
  auto rows = curve(schemes, p_grid);
  write_file(common.out, curve_csv(rows));
  return 0;
}

int cmd_report(const CommonOpts& common, const PipelineOpts& pipeline,
               const std::string& labels_file) {
  Corpus corpus = load_pipeline_corpus(pipeline, labels_file);
  const uint64_t seed = effective_seed(common);

  std::vector<std::pair<Candidate, Sentiment>> crowd;
  std::vector<std::pair<Candidate, Sentiment>> expert;
  std::vector<double> durations;
  for (const Tweet& tweet : corpus.tweets) {
    for (const auto& [cand, sent] : tweet.gold) expert.emplace_back(cand, sent);
    auto pool = corpus.pools.find(tweet.id);
    if (pool == corpus.pools.end()) continue;
    for (const LabelRecord& rec : pool->second)
      if (rec.duration_s) durations.push_back(*rec.duration_s);
    Rng tie_rng = stream_rng(seed, 0, tweet.id, StreamPurpose::TieBreak);
    for (Candidate cand : tweet.mentions) {
      std::vector<Sentiment> votes;
      for (const LabelRecord& rec : pool->second) {
        auto it = rec.labels.find(cand);
        if (it != rec.labels.end()) votes.push_back(it->second);
      }
      if (!votes.empty())
        crowd.emplace_back(cand, majority_vote(votes, tie_rng));
    }
  }

  SentimentTable crowd_table = sentiment_distribution(crowd);
  SentimentTable expert_table = sentiment_distribution(expert);
  DurationStats durations_summary = duration_stats(durations);

  fs::path dir(common.out);
  fs::create_directories(dir);
  write_file(dir / "crowd_sentiment.csv", crowd_table.to_csv());
  write_file(dir / "expert_sentiment.csv", expert_table.to_csv());
  write_file(dir / "durations.csv", durations_summary.to_csv());

  std::ostringstream summary;
  summary << "# seed=" << seed << "\n\n"
          << crowd_table.to_text("Tweets by crowd-sourced sentiment label")
          << "\n"
          << expert_table.to_text("Tweets by expert sentiment label") << "\n"
          << durations_summary.summary();
  write_file(dir / "summary.txt", summary.str());
  std::cout << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "crowdalloc: dynamic crowd-worker allocation for sentiment labeling"};
  app.require_subcommand(1);

  CommonOpts common;
  PipelineOpts pipeline;
  ExperimentCliOpts experiment;
  double alpha = 0.0;
  std::string schemes = "trad1,trad3,trad5,trad7,dyn3+2";
  int grid = 101;
  std::string report_labels;

  auto add_pipeline = [&](CLI::App* cmd, bool tweets_required = true) {
    auto* tweets = cmd->add_option("--tweets", pipeline.tweets_file,
                                   "Tweets JSONL file");
    if (tweets_required) tweets->required();
    cmd->add_option("--model", pipeline.model_file, "Sarcasm model JSON file");
    cmd->add_option("--clues", pipeline.clues_file, "Sarcasm clue config JSON");
    cmd->add_option("--lexicon", pipeline.lexicon_file,
                    "Mention lexicon JSON (candidate -> patterns)");
    cmd->add_option("--tau", pipeline.tau, "Sarcasm threshold override");
    cmd->add_option("--prevalence", pipeline.prevalence,
                    "Target sarcasm prevalence for calibration");
  };

  CLI::App* train_cmd =
      app.add_subcommand("train-sarcasm", "Train the sarcasm model");
  add_pipeline(train_cmd);
  train_cmd->add_option("--alpha", alpha, "Additive smoothing")
      ->check(CLI::NonNegativeNumber);
  add_common(train_cmd, common);

  CLI::App* score_cmd = app.add_subcommand("score", "Score tweets for sarcasm");
  add_pipeline(score_cmd);
  add_common(score_cmd, common);

  CLI::App* classify_cmd =
      app.add_subcommand("classify", "Assign difficulty classes");
  add_pipeline(classify_cmd);
  add_common(classify_cmd, common);

  auto add_experiment = [&](CLI::App* cmd) {
    add_pipeline(cmd, /*tweets_required=*/false);
    add_common(cmd, common, /*out_required=*/false);
    cmd->add_option("--config", experiment.config_file,
                    "Experiment config JSON; flags override its fields");
    cmd->add_option("--policy-config", experiment.policy_configs,
                    "Custom policy table JSON file(s)");
    cmd->add_option("--accuracy", experiment.accuracy,
                    "Synthetic per-class accuracies VE,E,M,H");
    cmd->add_option("--error-split", experiment.error_split,
                    "Weight of the first non-gold label on errors");
    cmd->add_option("--threads", experiment.threads, "Worker threads")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--outcomes", experiment.outcomes_dir,
                    "Directory for per-run outcome JSONL files");
    cmd->add_option("--scope", experiment.scope,
                    "Second-round ballots count for: whole|disputed");
  };

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "Synthetic-worker experiment");
  add_experiment(simulate_cmd);

  CLI::App* replay_cmd =
      app.add_subcommand("replay", "Replay experiment over recorded pools");
  add_experiment(replay_cmd);
  replay_cmd->add_option("--labels", experiment.labels_file,
                         "Labels JSONL file");

  CLI::App* curves_cmd =
      app.add_subcommand("curves", "Majority-vote probability curves");
  curves_cmd->add_option("--schemes", schemes,
                         "Comma-separated tradK / dynN+M schemes");
  curves_cmd->add_option("--grid", grid, "Grid points over p in [0,1]");
  add_common(curves_cmd, common);

  CLI::App* report_cmd =
      app.add_subcommand("report", "Sentiment distribution / duration tables");
  add_pipeline(report_cmd);
  report_cmd->add_option("--labels", report_labels, "Labels JSONL file")
      ->required();
  add_common(report_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train_sarcasm(common, pipeline, alpha);
    if (score_cmd->parsed()) return cmd_score(common, pipeline);
    if (classify_cmd->parsed()) return cmd_classify(common, pipeline);
    if (simulate_cmd->parsed())
      return cmd_experiment(simulate_cmd, common, pipeline, experiment,
                            SourceMode::Synthetic);
    if (replay_cmd->parsed())
      return cmd_experiment(replay_cmd, common, pipeline, experiment,
                            SourceMode::Replay);
    if (curves_cmd->parsed()) return cmd_curves(common, schemes, grid);
    if (report_cmd->parsed()) return cmd_report(common, pipeline, report_labels);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
