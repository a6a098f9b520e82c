#include "crowdalloc/sarcasm.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "crowdalloc/corpus.hpp"
#include "crowdalloc/error.hpp"
#include "crowdalloc/rng.hpp"
#include "crowdalloc/text.hpp"

namespace crowdalloc {

using nlohmann::json;

const std::array<std::string, kClueCount>& clue_names() {
  static const std::array<std::string, kClueCount> names = {
      "quotes",   "punctuation", "all_caps",  "emoticon",
      "laugh",    "yet_sudden",  "comparison"};
  return names;
}

const ClueConfig& default_clue_config() {
  static const ClueConfig cfg = [] {
    ClueConfig c;
    c.emoticons = {":)", ":(", ":D", ";)", ":-)", ":-("};
    c.laugh_words = {"lol", "rofl", "lmao", "omg", "eww"};
    c.laugh_prefixes = {"ahah", "haha"};
    for (const auto& [_, patterns] : default_mention_lexicon())
      for (const std::string& p : patterns) c.allcaps_exclude.push_back(p);
    return c;
  }();
  return cfg;
}

ClueConfig load_clue_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open clue config: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  ClueConfig cfg = default_clue_config();
  auto read_list = [&](const char* key, std::vector<std::string>& out) {
    if (!doc.contains(key)) return;
    out.clear();
    for (const auto& v : doc.at(key)) out.push_back(v.get<std::string>());
  };
  read_list("emoticons", cfg.emoticons);
  read_list("laugh_words", cfg.laugh_words);
  read_list("laugh_prefixes", cfg.laugh_prefixes);
  read_list("allcaps_exclude", cfg.allcaps_exclude);
  return cfg;
}

namespace {

// Matched pair of straight or curly double quotes.
bool has_quote_pair(std::string_view text) {
  size_t straight = std::count(text.begin(), text.end(), '"');
  if (straight >= 2) return true;
  size_t open = text.find("“");
  return open != std::string_view::npos &&
         text.find("”", open) != std::string_view::npos;
}

bool has_suspense_punctuation(std::string_view text) {
  if (text.find('?') != std::string_view::npos) return true;
  if (text.find('!') != std::string_view::npos) return true;
  if (text.find("...") != std::string_view::npos) return true;
  return text.find("…") != std::string_view::npos;
}

bool matches_any(std::string_view needle, const std::vector<std::string>& list) {
  return std::find(list.begin(), list.end(), needle) != list.end();
}

}  // namespace

FeatureVector extract_features(std::string_view text) {
  return extract_features(text, default_clue_config());
}

FeatureVector extract_features(std::string_view text, const ClueConfig& cfg) {
  FeatureVector f{};
  f[kClueQuotes] = has_quote_pair(text);
  f[kCluePunctuation] = has_suspense_punctuation(text);

  // Emoticons are matched on the raw text, everything token-based below.
  for (const std::string& e : cfg.emoticons) {
    if (contains(text, e)) {
      f[kClueEmoticon] = true;
      break;
    }
  }

  for (const std::string& raw : whitespace_tokens(text)) {
    std::string_view token = strip_punct(raw);
    if (token.empty()) continue;
    std::string lower = to_lower(token);

    if (!f[kClueAllCaps] && token.size() >= 3 && is_all_upper_alpha(token) &&
        !matches_any(lower, cfg.allcaps_exclude))
      f[kClueAllCaps] = true;

    if (!f[kClueLaugh]) {
      bool laugh = matches_any(lower, cfg.laugh_words);
      for (const std::string& p : cfg.laugh_prefixes)
        laugh = laugh || std::string_view(lower).starts_with(p);
      f[kClueLaugh] = laugh;
    }

    if (lower == "yet" || lower == "sudden") f[kClueYetSudden] = true;
    if (lower == "like" || lower == "would") f[kClueComparison] = true;
  }
  return f;
}

std::string corpus_fingerprint(
    std::span<const std::pair<FeatureVector, bool>> items) {
  // Sum of per-item hashes: invariant under permutation of the inputs.
  uint64_t acc = 0;
  for (const auto& [f, sarcastic] : items) {
    uint64_t bits = sarcastic ? 1 : 0;
    for (int n = 0; n < kClueCount; ++n)
      if (f[n]) bits |= uint64_t{1} << (n + 1);
    acc += mix64(bits + 0x6a09e667f3bcc909ULL);
  }
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(acc));
  return buf;
}

SarcasmModel train(std::span<const std::pair<FeatureVector, bool>> items,
                   double smoothing_alpha) {
  if (items.empty()) throw Error("train: empty training set");
  if (smoothing_alpha < 0) throw Error("train: negative smoothing alpha");

  std::array<long, kClueCount> with_clue{};
  std::array<long, kClueCount> sarcastic_with_clue{};
  for (const auto& [f, sarcastic] : items) {
    for (int n = 0; n < kClueCount; ++n) {
      if (!f[n]) continue;
      ++with_clue[n];
      if (sarcastic) ++sarcastic_with_clue[n];
    }
  }

  SarcasmModel model;
  for (int n = 0; n < kClueCount; ++n) {
    if (with_clue[n] == 0 && smoothing_alpha == 0.0)
      model.cond_prob[n] = 0.0;
    else
      model.cond_prob[n] = (sarcastic_with_clue[n] + smoothing_alpha) /
                           (with_clue[n] + 2.0 * smoothing_alpha);
  }
  double total = std::accumulate(model.cond_prob.begin(), model.cond_prob.end(), 0.0);
  if (total > 0)
    for (int n = 0; n < kClueCount; ++n)
      model.weights[n] = model.cond_prob[n] / total;
  model.corpus_fingerprint = corpus_fingerprint(items);
  return model;
}

double score(const SarcasmModel& model, const FeatureVector& f) {
  double s = 0.0;
  for (int n = 0; n < kClueCount; ++n)
    if (f[n]) s += model.weights[n];
  return s;
}

ThresholdResult calibrate_threshold(std::span<const double> scores,
                                    double target_prevalence) {
  if (scores.empty()) throw Error("calibrate_threshold: no scores");
  if (!(target_prevalence > 0.0 && target_prevalence < 1.0))
    throw Error("calibrate_threshold: target prevalence must be in (0, 1)");

  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  // Candidate taus are the observed scores; fraction >= tau shrinks as tau
  // walks up the sorted order.
  ThresholdResult result;
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    double fraction = (n - static_cast<double>(i)) / n;
    if (fraction <= target_prevalence) {
      result.tau = sorted[i];
      result.flagged_fraction = fraction;
      return result;
    }
  }
  result.tau = sorted.back();
  result.degenerate = true;
  size_t flagged = 0;
  for (double s : sorted)
    if (s >= result.tau) ++flagged;
  result.flagged_fraction = static_cast<double>(flagged) / n;
  return result;
}

void save_model(const SarcasmModel& model, const std::filesystem::path& path) {
  json doc;
  doc["cond_prob"] = model.cond_prob;
  doc["weights"] = model.weights;
  doc["feature_order"] = clue_names();
  doc["corpus_fingerprint"] = model.corpus_fingerprint;
  std::ofstream out(path);
  if (!out) throw Error("cannot write model file: " + path.string());
  out << doc.dump(2) << "\n";
}

SarcasmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  SarcasmModel model;
  try {
    auto cond = doc.at("cond_prob").get<std::vector<double>>();
    auto weights = doc.at("weights").get<std::vector<double>>();
    if (cond.size() != kClueCount || weights.size() != kClueCount)
      throw Error(path.string() + ": model must carry exactly 7 features");
    std::copy(cond.begin(), cond.end(), model.cond_prob.begin());
    std::copy(weights.begin(), weights.end(), model.weights.begin());
    if (doc.contains("feature_order")) {
      auto order = doc.at("feature_order").get<std::vector<std::string>>();
      for (int n = 0; n < kClueCount; ++n)
        if (order.at(n) != clue_names()[n])
          throw Error(path.string() + ": unexpected feature order at index " +
                      std::to_string(n));
    }
    model.corpus_fingerprint = doc.value("corpus_fingerprint", "");
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return model;
}

}  // namespace crowdalloc
