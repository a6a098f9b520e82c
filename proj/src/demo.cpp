#include "crowdalloc/demo.hpp"

#include <cmath>

namespace crowdalloc {

namespace {

// Filler vocabulary free of candidate patterns and sarcasm clue tokens, so
// generated factors are exactly the intended ones.
const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "the",     "senate",  "debate",  "covers", "policy",  "and",
      "jobs",    "tonight", "voters",  "watch",  "this",    "rally",
      "speech",  "crowd",   "state",   "primary", "media",  "report",
      "poll",    "numbers", "campaign", "votes",  "plan",   "health",
      "care",    "border",  "trade",   "energy", "economy", "taxes"};
  return words;
}

const std::vector<std::string>& laugh_tokens() {
  static const std::vector<std::string> words = {"haha", "lol", "ahah",
                                                 "hahaha"};
  return words;
}

}  // namespace

DemoCorpus make_demo_corpus(int n_tweets, int pool_size, uint64_t seed,
                            const DemoOptions& options) {
  if (n_tweets < 1) throw Error("make_demo_corpus: need at least one tweet");
  if (pool_size < 0) throw Error("make_demo_corpus: negative pool size");

  DemoCorpus demo;
  int sarcastic_count = 0;

  for (int i = 0; i < n_tweets; ++i) {
    Tweet tweet;
    tweet.id = "demo-" + std::to_string(i);
    Rng rng = stream_rng(seed, 0, tweet.id, StreamPurpose::Generate);

    size_t first = rng.below(kAllCandidates.size());
    tweet.mentions.insert(kAllCandidates[first]);
    if (rng.bernoulli(options.p_multiple)) {
      size_t second;
      do {
        second = rng.below(kAllCandidates.size());
      } while (second == first);
      tweet.mentions.insert(kAllCandidates[second]);
    }
    for (Candidate cand : tweet.mentions)
      tweet.gold[cand] = kAllSentiments[rng.below(kAllSentiments.size())];

    bool short_text = rng.bernoulli(options.p_short);
    bool link = rng.bernoulli(options.p_link);
    bool sarcastic = rng.bernoulli(options.p_sarcastic);
    tweet.gold_sarcastic = sarcastic;
    if (sarcastic) ++sarcastic_count;

    int target_words = short_text ? 4 + static_cast<int>(rng.below(4))
                                  : 12 + static_cast<int>(rng.below(6));
    std::vector<std::string> tokens;
    for (Candidate cand : tweet.mentions) tokens.push_back(to_string(cand));
    if (sarcastic)
      tokens.push_back(laugh_tokens()[rng.below(laugh_tokens().size())]);
    while (static_cast<int>(tokens.size()) < target_words)
      tokens.push_back(filler_words()[rng.below(filler_words().size())]);
    if (link) tokens.push_back("https://t.co/x" + std::to_string(i));

    std::string text;
    for (size_t t = 0; t < tokens.size(); ++t) {
      if (t) text += " ";
      text += tokens[t];
    }
    tweet.text = std::move(text);
    demo.corpus.tweets.push_back(std::move(tweet));
  }

  // Train the sarcasm model on the generated corpus and calibrate the
  // threshold on its own score distribution.
  std::vector<std::pair<FeatureVector, bool>> training;
  training.reserve(demo.corpus.tweets.size());
  for (const Tweet& tweet : demo.corpus.tweets)
    training.emplace_back(extract_features(tweet.text), *tweet.gold_sarcastic);
  demo.model = train(training);

  if (sarcastic_count == 0) {
    // No laugh clue anywhere: all scores are zero and no threshold can flag
    // a positive fraction, so pin tau above every score.
    demo.tau = 1.0;
  } else {
    std::vector<double> scores;
    scores.reserve(training.size());
    for (const auto& [f, _] : training) scores.push_back(score(demo.model, f));
    double prevalence = static_cast<double>(sarcastic_count) /
                        static_cast<double>(n_tweets);
    demo.tau = calibrate_threshold(scores, prevalence).tau;
  }
  demo.tree = default_tree(demo.tau);
  demo.classes = classify_corpus(demo.corpus, demo.tree, demo.model);

  // Recorded pools, labeled by synthetic workers at the pool model's
  // per-class accuracy.
  for (const Tweet& tweet : demo.corpus.tweets) {
    DifficultyClass cls = demo.classes.at(tweet.id);
    Rng rng = stream_rng(seed, 0, tweet.id, StreamPurpose::Pool);
    std::vector<LabelRecord>& pool = demo.corpus.pools[tweet.id];
    for (int w = 0; w < pool_size; ++w) {
      LabelRecord rec;
      rec.tweet_id = tweet.id;
      rec.worker_id = "w" + std::to_string(w);
      for (const auto& [cand, gold] : tweet.gold)
        rec.labels[cand] = synth_draw(options.pool_model, cls, gold, rng);
      rec.duration_s = std::floor((5.0 + rng.uniform() * 200.0) * 10.0) / 10.0;
      pool.push_back(std::move(rec));
    }
  }
  return demo;
}

}  // namespace crowdalloc
