#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crowdalloc/error.hpp"

namespace crowdalloc {

enum class Candidate { Clinton = 0, Cruz = 1, Sanders = 2, Trump = 3 };
enum class Sentiment { Positive = 0, Neutral = 1, Negative = 2 };

inline constexpr std::array<Candidate, 4> kAllCandidates = {
    Candidate::Clinton, Candidate::Cruz, Candidate::Sanders, Candidate::Trump};
inline constexpr std::array<Sentiment, 3> kAllSentiments = {
    Sentiment::Positive, Sentiment::Neutral, Sentiment::Negative};

const char* to_string(Candidate c);
const char* to_string(Sentiment s);
std::optional<Candidate> candidate_from_string(std::string_view name);
std::optional<Sentiment> sentiment_from_string(std::string_view name);

// One labeling item.  `mentions` drives which candidates get rated; `gold`
// holds the expert sentiment per mentioned candidate when available.
struct Tweet {
  std::string id;
  std::string text;
  std::set<Candidate> mentions;
  std::map<Candidate, Sentiment> gold;  // empty = no gold sentiments
  std::optional<bool> gold_sarcastic;

  bool has_full_gold() const;

  bool operator==(const Tweet&) const = default;
};

// One completed HIT: one worker's sentiment for every candidate mentioned in
// one tweet.
struct LabelRecord {
  std::string tweet_id;
  std::string worker_id;
  std::map<Candidate, Sentiment> labels;
  std::optional<double> duration_s;

  bool operator==(const LabelRecord&) const = default;
};

struct Corpus {
  std::vector<Tweet> tweets;
  // tweet id -> recorded worker labels, in file order
  std::unordered_map<std::string, std::vector<LabelRecord>> pools;

  const Tweet* find(std::string_view id) const;
  size_t pool_size(const std::string& id) const;

  bool operator==(const Corpus&) const = default;
};

using MentionLexicon = std::map<Candidate, std::vector<std::string>>;

// Last names, full names, handle variants and common hashtags per candidate.
// Patterns are matched as case-insensitive literal substrings.
const MentionLexicon& default_mention_lexicon();

MentionLexicon load_mention_lexicon(const std::filesystem::path& path);

std::set<Candidate> detect_mentions(std::string_view text,
                                    const MentionLexicon& lexicon);

// JSON Lines loaders.  Errors carry "<path>:<line>: <reason>".  A file-given
// mentions field is authoritative; when it is absent the loader falls back
// to detect_mentions over the lexicon.
std::vector<Tweet> load_tweets(const std::filesystem::path& path);
std::vector<Tweet> load_tweets(const std::filesystem::path& path,
                               const MentionLexicon& fallback_lexicon);

// Appends label records to `corpus.pools`, validating each against the
// referenced tweet.  Duplicate (tweet, worker) pairs are a hard error.
void load_labels(Corpus& corpus, const std::filesystem::path& path);

Corpus load_corpus(const std::filesystem::path& tweets_path,
                   const std::optional<std::filesystem::path>& labels_path);
Corpus load_corpus(const std::filesystem::path& tweets_path,
                   const std::optional<std::filesystem::path>& labels_path,
                   const MentionLexicon& fallback_lexicon);

void save_tweets(const Corpus& corpus, const std::filesystem::path& path);
void save_labels(const Corpus& corpus, const std::filesystem::path& path);

struct ValidationReport {
  struct PerTweet {
    std::string id;
    size_t pool_size = 0;
    size_t mention_count = 0;
    bool has_full_gold = false;
  };
  std::vector<PerTweet> per_tweet;
  size_t required_pool = 0;
  size_t tweets_without_gold = 0;
  size_t min_pool = 0;
  size_t max_pool = 0;
  bool experiment_ready = false;

  std::string summary() const;
};

// `required_pool` is the largest number of labels any policy of interest can
// request for one tweet (7 across the built-in tables).
ValidationReport validate_corpus(const Corpus& corpus, size_t required_pool = 7);

}  // namespace crowdalloc
