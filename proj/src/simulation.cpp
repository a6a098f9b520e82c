#include "crowdalloc/simulation.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <sstream>

namespace crowdalloc {

Sentiment synth_draw(const SyntheticWorkerModel& model, DifficultyClass cls,
                     Sentiment gold, Rng& rng) {
  if (rng.bernoulli(model.accuracy[static_cast<size_t>(cls)])) return gold;
  std::array<Sentiment, 2> others;
  size_t k = 0;
  for (Sentiment s : kAllSentiments)
    if (s != gold) others[k++] = s;
  return rng.bernoulli(model.error_weight_first) ? others[0] : others[1];
}

std::vector<LabelRecord> SyntheticSource::draw(const Tweet& tweet,
                                               DifficultyClass cls, int n,
                                               int round, Rng& rng) {
  std::vector<LabelRecord> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    LabelRecord rec;
    rec.tweet_id = tweet.id;
    rec.worker_id = "sim-r" + std::to_string(round) + "-" + std::to_string(i);
    for (Candidate cand : tweet.mentions) {
      auto it = tweet.gold.find(cand);
      if (it == tweet.gold.end())
        throw Error("synthetic source: tweet '" + tweet.id +
                    "' has no gold label for " + to_string(cand));
      rec.labels[cand] = synth_draw(model_, cls, it->second, rng);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

ReplaySampler::ReplaySampler(const Corpus& corpus) : corpus_(&corpus) {
  for (const auto& [id, pool] : corpus.pools) {
    std::vector<size_t> indices(pool.size());
    for (size_t i = 0; i < pool.size(); ++i) indices[i] = i;
    remaining_[id] = std::move(indices);
  }
}

size_t ReplaySampler::capacity(const std::string& tweet_id) const {
  auto it = remaining_.find(tweet_id);
  return it == remaining_.end() ? 0 : it->second.size();
}

std::vector<LabelRecord> ReplaySampler::draw(const Tweet& tweet,
                                             DifficultyClass, int n, int,
                                             Rng& rng) {
  auto it = remaining_.find(tweet.id);
  size_t have = it == remaining_.end() ? 0 : it->second.size();
  if (have < static_cast<size_t>(n))
    throw Error("label pool exhausted for tweet '" + tweet.id + "': requested " +
                std::to_string(n) + ", " + std::to_string(have) + " left");
  std::vector<size_t>& indices = it->second;
  const auto& pool = corpus_->pools.at(tweet.id);
  // Partial Fisher-Yates: the first n slots become the uniform sample.
  std::vector<LabelRecord> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    size_t j = i + rng.below(indices.size() - i);
    std::swap(indices[i], indices[j]);
    out.push_back(pool[indices[i]]);
  }
  indices.erase(indices.begin(), indices.begin() + n);
  return out;
}

std::vector<RatingPair> outcome_pairs(const Corpus& corpus,
                                      const AllocationOutcome& outcome) {
  std::vector<RatingPair> pairs;
  for (size_t i = 0; i < outcome.per_tweet.size(); ++i) {
    const TweetOutcome& row = outcome.per_tweet[i];
    const Tweet* tweet = i < corpus.tweets.size() && corpus.tweets[i].id == row.tweet_id
                             ? &corpus.tweets[i]
                             : corpus.find(row.tweet_id);
    if (!tweet) throw Error("outcome for unknown tweet '" + row.tweet_id + "'");
    for (const auto& [cand, predicted] : row.final_labels) {
      auto it = tweet->gold.find(cand);
      if (it == tweet->gold.end())
        throw Error("tweet '" + row.tweet_id + "' has no gold label for " +
                    to_string(cand));
      pairs.push_back({it->second, predicted});
    }
  }
  return pairs;
}

std::vector<RatingPair> outcome_pairs(const Corpus& corpus,
                                      const AllocationOutcome& outcome,
                                      Candidate only) {
  std::vector<RatingPair> pairs;
  for (size_t i = 0; i < outcome.per_tweet.size(); ++i) {
    const TweetOutcome& row = outcome.per_tweet[i];
    auto found = row.final_labels.find(only);
    if (found == row.final_labels.end()) continue;
    const Tweet* tweet = i < corpus.tweets.size() && corpus.tweets[i].id == row.tweet_id
                             ? &corpus.tweets[i]
                             : corpus.find(row.tweet_id);
    if (!tweet) throw Error("outcome for unknown tweet '" + row.tweet_id + "'");
    auto it = tweet->gold.find(only);
    if (it == tweet->gold.end())
      throw Error("tweet '" + row.tweet_id + "' has no gold label for " +
                  to_string(only));
    pairs.push_back({it->second, found->second});
  }
  return pairs;
}

ClassMap classify_corpus(const Corpus& corpus, const DecisionTree& tree,
                         const SarcasmModel& model) {
  ClassMap classes;
  classes.reserve(corpus.tweets.size());
  for (const Tweet& tweet : corpus.tweets)
    classes[tweet.id] = tree.classify(derive_meta(tweet, model));
  return classes;
}

namespace {

void validate_config(const ExperimentConfig& config) {
  if (config.policies.empty()) throw Error("experiment: no policies");
  if (config.runs < 1) throw Error("experiment: runs must be >= 1");
  if (config.price_per_task < 0) throw Error("experiment: negative price");
  if (config.threads < 1) throw Error("experiment: threads must be >= 1");
  for (double a : config.worker_model.accuracy)
    if (!(a >= 0.0 && a <= 1.0))
      throw Error("experiment: accuracy out of [0, 1]");
  if (!(config.worker_model.error_weight_first >= 0.0 &&
        config.worker_model.error_weight_first <= 1.0))
    throw Error("experiment: error split weight out of [0, 1]");
}

// Replay cannot start unless every tweet's pool covers the worst case the
// policy may request for its class.
void check_replay_capacity(const ExperimentConfig& config, const Corpus& corpus,
                           const ClassMap& classes) {
  for (const AllocationPolicy& policy : config.policies) {
    for (const Tweet& tweet : corpus.tweets) {
      auto it = classes.find(tweet.id);
      if (it == classes.end())
        throw Error("experiment: no difficulty class for tweet '" + tweet.id +
                    "'");
      size_t need = policy.max_request(it->second);
      size_t have = corpus.pool_size(tweet.id);
      if (have < need)
        throw Error("experiment: policy " + policy.name + " may request " +
                    std::to_string(need) + " labels for tweet '" + tweet.id +
                    "' but the pool holds " + std::to_string(have));
    }
  }
}

void check_gold(const Corpus& corpus) {
  for (const Tweet& tweet : corpus.tweets)
    if (!tweet.has_full_gold())
      throw Error("experiment: tweet '" + tweet.id +
                  "' lacks gold labels; corpus is not experiment-ready");
}

EvalRow make_row(const std::string& policy, int run,
                 const AllocationOutcome& outcome, const Corpus& corpus,
                 double price) {
  EvalRow row;
  row.policy = policy;
  row.run = run;
  row.total_tasks = static_cast<double>(outcome.total_tasks);
  row.budget = budget(outcome.total_tasks, price);
  auto pairs = outcome_pairs(corpus, outcome);
  row.kappa_pooled = cohens_kappa(pairs);
  row.agreement = percent_agreement(pairs);
  for (Candidate cand : kAllCandidates) {
    auto cand_pairs = outcome_pairs(corpus, outcome, cand);
    size_t i = static_cast<size_t>(cand);
    row.kappa_defined[i] = !cand_pairs.empty();
    if (row.kappa_defined[i]) row.kappa_per_candidate[i] = cohens_kappa(cand_pairs);
  }
  row.tie_events = static_cast<double>(outcome.tie_events);
  return row;
}

EvalRow mean_of(const std::vector<EvalRow>& rows) {
  EvalRow mean;
  mean.policy = rows.front().policy;
  mean.run = -1;
  const double n = static_cast<double>(rows.size());
  std::array<int, 4> defined_count{};
  for (const EvalRow& row : rows) {
    mean.total_tasks += row.total_tasks / n;
    mean.budget += row.budget / n;
    mean.kappa_pooled += row.kappa_pooled / n;
    mean.agreement += row.agreement / n;
    mean.tie_events += row.tie_events / n;
    for (size_t i = 0; i < 4; ++i) {
      if (row.kappa_defined[i]) {
        mean.kappa_per_candidate[i] += row.kappa_per_candidate[i];
        ++defined_count[i];
      }
    }
  }
  for (size_t i = 0; i < 4; ++i) {
    mean.kappa_defined[i] = defined_count[i] > 0;
    if (defined_count[i] > 0) mean.kappa_per_candidate[i] /= defined_count[i];
  }
  return mean;
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& config, const Corpus& corpus,
                          const ClassMap& classes,
                          std::vector<AllocationOutcome>* outcomes) {
  validate_config(config);
  if (corpus.tweets.empty()) throw Error("experiment: empty corpus");
  check_gold(corpus);
  if (config.mode == SourceMode::Replay)
    check_replay_capacity(config, corpus, classes);

  EvalReport report;
  report.seed = config.seed;
  report.runs = config.runs;
  report.price_per_task = config.price_per_task;

  for (const AllocationPolicy& policy : config.policies) {
    std::vector<EvalRow> rows;
    for (int run = 0; run < config.runs; ++run) {
      std::unique_ptr<LabelSource> source;
      if (config.mode == SourceMode::Replay)
        source = std::make_unique<ReplaySampler>(corpus);
      else
        source = std::make_unique<SyntheticSource>(config.worker_model);
      RunOptions options;
      options.run_index = static_cast<uint32_t>(run);
      options.threads = config.threads;
      options.scope = config.scope;
      AllocationOutcome outcome =
          run_policy(policy, corpus, classes, *source, config.seed, options);
      rows.push_back(make_row(policy.name, run, outcome, corpus,
                              config.price_per_task));
      if (outcomes) outcomes->push_back(std::move(outcome));
    }
    EvalRow mean = mean_of(rows);
    for (EvalRow& row : rows) report.rows.push_back(std::move(row));
    report.rows.push_back(std::move(mean));
  }
  return report;
}

const EvalRow* EvalReport::mean_row(const std::string& policy) const {
  for (const EvalRow& row : rows)
    if (row.run == -1 && row.policy == policy) return &row;
  return nullptr;
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  char buf[512];
  snprintf(buf, sizeof buf, "# seed=%llu runs=%d price_per_task=%.4f\n",
           static_cast<unsigned long long>(seed), runs, price_per_task);
  out << buf;
  out << "policy,run,total_tasks,budget,kappa_pooled,kappa_clinton,kappa_cruz,"
         "kappa_sanders,kappa_trump,agreement,tie_events\n";
  for (const EvalRow& row : rows) {
    if (row.run == -1)
      snprintf(buf, sizeof buf, "%s,mean,%.3f,%.2f,", row.policy.c_str(),
               row.total_tasks, row.budget);
    else
      snprintf(buf, sizeof buf, "%s,%d,%.0f,%.2f,", row.policy.c_str(), row.run,
               row.total_tasks, row.budget);
    out << buf;
    snprintf(buf, sizeof buf, "%.6f,", row.kappa_pooled);
    out << buf;
    for (size_t i = 0; i < 4; ++i) {
      if (row.kappa_defined[i]) {
        snprintf(buf, sizeof buf, "%.6f,", row.kappa_per_candidate[i]);
        out << buf;
      } else {
        out << ",";
      }
    }
    if (row.run == -1)
      snprintf(buf, sizeof buf, "%.6f,%.3f\n", row.agreement, row.tie_events);
    else
      snprintf(buf, sizeof buf, "%.6f,%.0f\n", row.agreement, row.tie_events);
    out << buf;
  }
  return out.str();
}

double simulate_scheme_accuracy(const Scheme& scheme, double p, long n_items,
                                uint64_t seed) {
  SyntheticWorkerModel model;
  model.accuracy.fill(p);
  model.error_weight_first = 1.0;  // degenerate: one shared wrong label
  const Sentiment gold = Sentiment::Positive;
  const DifficultyClass cls = DifficultyClass::VeryEasy;
  const int first =
      scheme.kind == Scheme::Kind::Fixed ? scheme.fixed_k : scheme.initial;

  long correct = 0;
  std::vector<Sentiment> votes;
  char item_id[32];
  for (long i = 0; i < n_items; ++i) {
    snprintf(item_id, sizeof item_id, "mc-%ld", i);
    votes.clear();
    Rng rng = stream_rng(seed, 0, item_id, StreamPurpose::FirstRound);
    for (int j = 0; j < first; ++j)
      votes.push_back(synth_draw(model, cls, gold, rng));
    if (scheme.kind == Scheme::Kind::Dynamic) {
      bool all_same =
          std::all_of(votes.begin(), votes.end(),
                      [&](Sentiment s) { return s == votes.front(); });
      if (!all_same) {
        Rng rng2 = stream_rng(seed, 0, item_id, StreamPurpose::SecondRound);
        for (int j = 0; j < scheme.extra; ++j)
          votes.push_back(synth_draw(model, cls, gold, rng2));
      }
    }
    Rng tie_rng = stream_rng(seed, 0, item_id, StreamPurpose::TieBreak);
    if (majority_vote(votes, tie_rng) == gold) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n_items);
}

}  // namespace crowdalloc
