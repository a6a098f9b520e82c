#pragma once

#include <cstdint>

#include "crowdalloc/corpus.hpp"
#include "crowdalloc/difficulty.hpp"
#include "crowdalloc/sarcasm.hpp"
#include "crowdalloc/simulation.hpp"

namespace crowdalloc {

// Deterministic synthetic corpus for experiments and tests: tweets whose
// text drives the real feature extractor and default tree, full gold
// sentiment, gold sarcasm flags, and a recorded label pool per tweet.
struct DemoCorpus {
  Corpus corpus;
  SarcasmModel model;   // trained on the generated tweets
  double tau = 0.0;     // calibrated on the generated scores
  DecisionTree tree;    // default tree at tau
  ClassMap classes;
};

struct DemoOptions {
  double p_multiple = 0.35;   // second candidate mentioned
  double p_short = 0.30;      // fewer than 10 proper words
  double p_link = 0.25;       // trailing URL
  double p_sarcastic = 0.15;  // laugh clue + gold_sarcastic
  SyntheticWorkerModel pool_model;  // accuracy of the recorded pool workers
};

DemoCorpus make_demo_corpus(int n_tweets, int pool_size, uint64_t seed,
                            const DemoOptions& options = {});

}  // namespace crowdalloc
