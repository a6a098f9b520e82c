#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crowdalloc/error.hpp"

namespace crowdalloc {

// The seven sarcasm clue categories, in fixed order.
enum Clue : int {
  kClueQuotes = 0,      // matched pair of straight or curly double quotes
  kCluePunctuation,     // '?', '!', "..." or the one-char ellipsis
  kClueAllCaps,         // all-caps token (>= 3 letters, not a candidate name)
  kClueEmoticon,        // ":)", ":(", ...
  kClueLaugh,           // laugh / texting lingo: haha*, lol, omg, ...
  kClueYetSudden,       // the words 'yet' and 'sudden'
  kClueComparison,      // comparison words 'like' and 'would'
};
inline constexpr int kClueCount = 7;

using FeatureVector = std::array<bool, kClueCount>;

const std::array<std::string, kClueCount>& clue_names();

// Matcher lists for the clue categories.  All configurable; the defaults are
// what ships in data/sarcasm_clues.json.
struct ClueConfig {
  std::vector<std::string> emoticons;
  std::vector<std::string> laugh_words;     // exact token match
  std::vector<std::string> laugh_prefixes;  // token prefix match
  // Tokens matching these (case-insensitive) never count as all-caps clues;
  // defaults to every pattern of the default mention lexicon.
  std::vector<std::string> allcaps_exclude;
};

const ClueConfig& default_clue_config();
ClueConfig load_clue_config(const std::filesystem::path& path);

FeatureVector extract_features(std::string_view text);
FeatureVector extract_features(std::string_view text, const ClueConfig& cfg);

// Per-clue conditional sarcasm probabilities and the normalized weight
// vector derived from them.
struct SarcasmModel {
  std::array<double, kClueCount> cond_prob{};
  std::array<double, kClueCount> weights{};
  std::string corpus_fingerprint;
};

// cond_prob[n] = #sarcastic items with clue n / #items with clue n (0 when
// the clue never occurs; `smoothing_alpha` > 0 switches to the additive
// estimate (s+a)/(n+2a)).  weights = cond_prob normalized to sum 1, or all
// zero when every cond_prob is zero.
SarcasmModel train(std::span<const std::pair<FeatureVector, bool>> items,
                   double smoothing_alpha = 0.0);

// w . f, in [0, 1].
double score(const SarcasmModel& model, const FeatureVector& f);

// Observed sarcasm prevalence in the training data behind the default
// threshold target: 73 sarcastic tweets out of 800.
inline constexpr double kDefaultSarcasmPrevalence = 73.0 / 800.0;

struct ThresholdResult {
  double tau = 0.0;
  double flagged_fraction = 0.0;
  // Set when no score satisfies the target (e.g. all scores equal); tau then
  // falls back to the highest observed score.
  bool degenerate = false;
};

// Smallest observed score tau such that the fraction of scores >= tau is
// <= target_prevalence.
ThresholdResult calibrate_threshold(std::span<const double> scores,
                                    double target_prevalence);

void save_model(const SarcasmModel& model, const std::filesystem::path& path);
SarcasmModel load_model(const std::filesystem::path& path);

// Order-independent digest of the training inputs, stored in the model file.
std::string corpus_fingerprint(
    std::span<const std::pair<FeatureVector, bool>> items);

}  // namespace crowdalloc
