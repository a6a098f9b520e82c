#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "crowdalloc/allocation.hpp"
#include "crowdalloc/analytics.hpp"
#include "crowdalloc/corpus.hpp"
#include "crowdalloc/difficulty.hpp"
#include "crowdalloc/evaluation.hpp"
#include "crowdalloc/rng.hpp"

namespace crowdalloc {

// Three-category worker model: the gold label with probability
// accuracy[class], otherwise one of the two other sentiments split by
// error_weight_first (weight on the first non-gold label in
// positive < neutral < negative order).  1.0 degenerates every error onto a
// single wrong label, reproducing the analytics binary model.
struct SyntheticWorkerModel {
  std::array<double, 4> accuracy = {0.9, 0.8, 0.7, 0.6};  // by DifficultyClass
  double error_weight_first = 0.5;
};

Sentiment synth_draw(const SyntheticWorkerModel& model, DifficultyClass cls,
                     Sentiment gold, Rng& rng);

// LabelSource backed by the synthetic worker model; requires full gold on
// every tweet it is asked about.  Stateless: worker ids come from (round,
// draw index), so draws are schedule-independent and thread-safe.
class SyntheticSource : public LabelSource {
 public:
  explicit SyntheticSource(SyntheticWorkerModel model) : model_(model) {}

  std::vector<LabelRecord> draw(const Tweet& tweet, DifficultyClass cls, int n,
                                int round, Rng& rng) override;
  size_t capacity(const std::string&) const override { return SIZE_MAX; }

 private:
  SyntheticWorkerModel model_;
};

// LabelSource that samples a recorded pool uniformly without replacement;
// second-round draws exclude first-round records.  The consumed state is per
// tweet and pre-allocated, so distinct tweets may be drawn from in parallel.
class ReplaySampler : public LabelSource {
 public:
  explicit ReplaySampler(const Corpus& corpus);

  std::vector<LabelRecord> draw(const Tweet& tweet, DifficultyClass cls, int n,
                                int round, Rng& rng) override;
  size_t capacity(const std::string& tweet_id) const override;

 private:
  const Corpus* corpus_;
  // tweet id -> indices into the pool that are still unconsumed
  std::unordered_map<std::string, std::vector<size_t>> remaining_;
};

enum class SourceMode { Synthetic, Replay };

struct ExperimentConfig {
  std::vector<AllocationPolicy> policies;
  int runs = 5;
  uint64_t seed = 0;
  double price_per_task = 0.05;
  int threads = 1;
  SourceMode mode = SourceMode::Synthetic;
  SyntheticWorkerModel worker_model;
  RunOptions::SecondRoundScope scope = RunOptions::SecondRoundScope::WholeTweet;
};

struct EvalRow {
  std::string policy;
  int run = 0;  // -1 for the mean row
  double total_tasks = 0.0;
  double budget = 0.0;
  double kappa_pooled = 0.0;
  std::array<double, 4> kappa_per_candidate{};
  std::array<bool, 4> kappa_defined{};
  double agreement = 0.0;
  double tie_events = 0.0;
};

struct EvalReport {
  uint64_t seed = 0;
  int runs = 0;
  double price_per_task = 0.0;
  std::vector<EvalRow> rows;  // per run, mean row after each policy's runs

  const EvalRow* mean_row(const std::string& policy) const;
  std::string to_csv() const;
};

// Runs every policy `runs` times with run-indexed streams, scores each run
// against gold, and reports per-run and mean metrics.  Replay mode refuses
// to start when any tweet's pool cannot cover a policy's worst case.
EvalReport run_experiment(const ExperimentConfig& config, const Corpus& corpus,
                          const ClassMap& classes,
                          std::vector<AllocationOutcome>* outcomes = nullptr);

// Gold-vs-majority pairs for one outcome, over (tweet, candidate) units.
std::vector<RatingPair> outcome_pairs(const Corpus& corpus,
                                      const AllocationOutcome& outcome);
std::vector<RatingPair> outcome_pairs(const Corpus& corpus,
                                      const AllocationOutcome& outcome,
                                      Candidate only);

ClassMap classify_corpus(const Corpus& corpus, const DecisionTree& tree,
                         const SarcasmModel& model);

// Monte Carlo accuracy of one scheme on single-candidate items with the
// degenerate (single wrong label) worker model; the empirical counterpart of
// pm_fixed / pm_dynamic.
double simulate_scheme_accuracy(const Scheme& scheme, double p, long n_items,
                                uint64_t seed);

}  // namespace crowdalloc
