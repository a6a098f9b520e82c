#include "crowdalloc/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "crowdalloc/text.hpp"

namespace crowdalloc {

using nlohmann::json;

const char* to_string(Candidate c) {
  switch (c) {
    case Candidate::Clinton: return "Clinton";
    case Candidate::Cruz: return "Cruz";
    case Candidate::Sanders: return "Sanders";
    case Candidate::Trump: return "Trump";
  }
  return "?";
}

const char* to_string(Sentiment s) {
  switch (s) {
    case Sentiment::Positive: return "positive";
    case Sentiment::Neutral: return "neutral";
    case Sentiment::Negative: return "negative";
  }
  return "?";
}

std::optional<Candidate> candidate_from_string(std::string_view name) {
  std::string lower = to_lower(name);
  for (Candidate c : kAllCandidates)
    if (lower == to_lower(to_string(c))) return c;
  return std::nullopt;
}

std::optional<Sentiment> sentiment_from_string(std::string_view name) {
  std::string lower = to_lower(name);
  for (Sentiment s : kAllSentiments)
    if (lower == to_string(s)) return s;
  return std::nullopt;
}

bool Tweet::has_full_gold() const {
  if (mentions.empty()) return false;
  for (Candidate c : mentions)
    if (!gold.count(c)) return false;
  return true;
}

const Tweet* Corpus::find(std::string_view id) const {
  for (const Tweet& t : tweets)
    if (t.id == id) return &t;
  return nullptr;
}

size_t Corpus::pool_size(const std::string& id) const {
  auto it = pools.find(id);
  return it == pools.end() ? 0 : it->second.size();
}

const MentionLexicon& default_mention_lexicon() {
  static const MentionLexicon lexicon = {
      {Candidate::Clinton,
       {"clinton", "hillary", "@hillaryclinton", "#hillary2016", "#imwithher",
        "#hillaryclinton2016"}},
      {Candidate::Cruz,
       {"cruz", "ted cruz", "@tedcruz", "#cruzcrew", "#choosecruz",
        "#cruz2016"}},
      {Candidate::Sanders,
       {"sanders", "bernie", "@berniesanders", "#feelthebern", "#bernie2016",
        "#berniesanders"}},
      {Candidate::Trump,
       {"trump", "donald", "@realdonaldtrump", "#trump2016",
        "#makeamericagreatagain", "#trumptrain"}},
  };
  return lexicon;
}

MentionLexicon load_mention_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(path.string() + ": expected a JSON object");
  MentionLexicon lexicon;
  for (const auto& [key, value] : doc.items()) {
    auto cand = candidate_from_string(key);
    if (!cand) throw Error(path.string() + ": unknown candidate '" + key + "'");
    std::vector<std::string> patterns;
    for (const auto& p : value) patterns.push_back(to_lower(p.get<std::string>()));
    if (patterns.empty())
      throw Error(path.string() + ": empty pattern list for '" + key + "'");
    lexicon[*cand] = std::move(patterns);
  }
  if (lexicon.empty()) throw Error(path.string() + ": empty lexicon");
  return lexicon;
}

std::set<Candidate> detect_mentions(std::string_view text,
                                    const MentionLexicon& lexicon) {
  std::string lower = to_lower(text);
  std::set<Candidate> found;
  for (const auto& [cand, patterns] : lexicon) {
    for (const std::string& p : patterns) {
      if (contains(lower, to_lower(p))) {
        found.insert(cand);
        break;
      }
    }
  }
  return found;
}

namespace {

std::string where(const std::filesystem::path& path, size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::map<Candidate, Sentiment> parse_label_map(const json& obj,
                                               const std::string& ctx) {
  if (!obj.is_object()) throw Error(ctx + ": expected an object");
  std::map<Candidate, Sentiment> out;
  for (const auto& [key, value] : obj.items()) {
    auto cand = candidate_from_string(key);
    if (!cand) throw Error(ctx + ": unknown candidate '" + key + "'");
    auto sent = sentiment_from_string(value.get<std::string>());
    if (!sent)
      throw Error(ctx + ": unknown sentiment '" + value.get<std::string>() +
                  "' for " + key);
    out[*cand] = *sent;
  }
  return out;
}

// Runs fn(line_no, parsed_json) for every nonempty line.
template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(where(path, line_no) + ": malformed JSON: " + e.what());
    }
    fn(line_no, doc);
  }
}

}  // namespace

std::vector<Tweet> load_tweets(const std::filesystem::path& path) {
  return load_tweets(path, default_mention_lexicon());
}

std::vector<Tweet> load_tweets(const std::filesystem::path& path,
                               const MentionLexicon& fallback_lexicon) {
  std::vector<Tweet> tweets;
  std::set<std::string> seen;
  for_each_jsonl(path, [&](size_t line_no, const json& doc) {
    const std::string ctx = where(path, line_no);
    Tweet t;
    try {
      t.id = doc.at("id").get<std::string>();
      t.text = doc.at("text").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ctx + ": " + e.what());
    }
    if (t.id.empty()) throw Error(ctx + ": empty tweet id");
    if (!seen.insert(t.id).second)
      throw Error(ctx + ": duplicate tweet id '" + t.id + "'");
    if (doc.contains("mentions")) {
      for (const auto& m : doc.at("mentions")) {
        auto cand = candidate_from_string(m.get<std::string>());
        if (!cand)
          throw Error(ctx + ": unknown candidate '" + m.get<std::string>() + "'");
        t.mentions.insert(*cand);
      }
    } else {
      t.mentions = detect_mentions(t.text, fallback_lexicon);
    }
    if (doc.contains("gold")) {
      t.gold = parse_label_map(doc.at("gold"), ctx);
      for (const auto& [cand, _] : t.gold)
        if (!t.mentions.count(cand))
          throw Error(ctx + ": gold label for unmentioned candidate " +
                      to_string(cand));
    }
    if (doc.contains("gold_sarcastic"))
      t.gold_sarcastic = doc.at("gold_sarcastic").get<bool>();
    tweets.push_back(std::move(t));
  });
  return tweets;
}

void load_labels(Corpus& corpus, const std::filesystem::path& path) {
  std::unordered_map<std::string, const Tweet*> by_id;
  for (const Tweet& t : corpus.tweets) by_id[t.id] = &t;
  std::set<std::pair<std::string, std::string>> seen_pairs;
  for (const auto& [id, pool] : corpus.pools)
    for (const LabelRecord& r : pool) seen_pairs.insert({r.tweet_id, r.worker_id});

  for_each_jsonl(path, [&](size_t line_no, const json& doc) {
    const std::string ctx = where(path, line_no);
    LabelRecord rec;
    try {
      rec.tweet_id = doc.at("tweet_id").get<std::string>();
      rec.worker_id = doc.at("worker_id").get<std::string>();
      rec.labels = parse_label_map(doc.at("labels"), ctx);
    } catch (const json::exception& e) {
      throw Error(ctx + ": " + e.what());
    }
    if (doc.contains("duration_s")) {
      double d = doc.at("duration_s").get<double>();
      if (d < 0) throw Error(ctx + ": negative duration_s");
      rec.duration_s = d;
    }
    auto it = by_id.find(rec.tweet_id);
    if (it == by_id.end())
      throw Error(ctx + ": label for unknown tweet '" + rec.tweet_id + "'");
    const Tweet& tweet = *it->second;
    for (const auto& [cand, _] : rec.labels)
      if (!tweet.mentions.count(cand))
        throw Error(ctx + ": label for unmentioned candidate " +
                    to_string(cand) + " on tweet '" + rec.tweet_id + "'");
    for (Candidate cand : tweet.mentions)
      if (!rec.labels.count(cand))
        throw Error(ctx + ": missing label for mentioned candidate " +
                    to_string(cand) + " on tweet '" + rec.tweet_id + "'");
    if (!seen_pairs.insert({rec.tweet_id, rec.worker_id}).second)
      throw Error(ctx + ": duplicate label record for (tweet '" + rec.tweet_id +
                  "', worker '" + rec.worker_id + "')");
    corpus.pools[rec.tweet_id].push_back(std::move(rec));
  });
}

Corpus load_corpus(const std::filesystem::path& tweets_path,
                   const std::optional<std::filesystem::path>& labels_path) {
  return load_corpus(tweets_path, labels_path, default_mention_lexicon());
}

Corpus load_corpus(const std::filesystem::path& tweets_path,
                   const std::optional<std::filesystem::path>& labels_path,
                   const MentionLexicon& fallback_lexicon) {
  Corpus corpus;
  corpus.tweets = load_tweets(tweets_path, fallback_lexicon);
  if (labels_path) load_labels(corpus, *labels_path);
  return corpus;
}

namespace {

json tweet_to_json(const Tweet& t) {
  json doc;
  doc["id"] = t.id;
  doc["text"] = t.text;
  json mentions = json::array();
  for (Candidate c : t.mentions) mentions.push_back(to_string(c));
  doc["mentions"] = mentions;
  if (!t.gold.empty()) {
    json gold = json::object();
    for (const auto& [cand, sent] : t.gold) gold[to_string(cand)] = to_string(sent);
    doc["gold"] = gold;
  }
  if (t.gold_sarcastic) doc["gold_sarcastic"] = *t.gold_sarcastic;
  return doc;
}

json record_to_json(const LabelRecord& r) {
  json doc;
  doc["tweet_id"] = r.tweet_id;
  doc["worker_id"] = r.worker_id;
  json labels = json::object();
  for (const auto& [cand, sent] : r.labels) labels[to_string(cand)] = to_string(sent);
  doc["labels"] = labels;
  if (r.duration_s) doc["duration_s"] = *r.duration_s;
  return doc;
}

}  // namespace

void save_tweets(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  for (const Tweet& t : corpus.tweets) out << tweet_to_json(t).dump() << "\n";
}

void save_labels(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  for (const Tweet& t : corpus.tweets) {
    auto it = corpus.pools.find(t.id);
    if (it == corpus.pools.end()) continue;
    for (const LabelRecord& r : it->second) out << record_to_json(r).dump() << "\n";
  }
}

ValidationReport validate_corpus(const Corpus& corpus, size_t required_pool) {
  ValidationReport report;
  report.required_pool = required_pool;
  report.experiment_ready = !corpus.tweets.empty();
  bool first = true;
  for (const Tweet& t : corpus.tweets) {
    ValidationReport::PerTweet row;
    row.id = t.id;
    row.pool_size = corpus.pool_size(t.id);
    row.mention_count = t.mentions.size();
    row.has_full_gold = t.has_full_gold();
    if (!row.has_full_gold) ++report.tweets_without_gold;
    if (first || row.pool_size < report.min_pool) report.min_pool = row.pool_size;
    if (first || row.pool_size > report.max_pool) report.max_pool = row.pool_size;
    first = false;
    if (!row.has_full_gold || row.pool_size < required_pool)
      report.experiment_ready = false;
    report.per_tweet.push_back(std::move(row));
  }
  return report;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << "tweets: " << per_tweet.size() << "\n"
      << "pool size: min " << min_pool << ", max " << max_pool
      << " (required " << required_pool << ")\n"
      << "tweets without full gold: " << tweets_without_gold << "\n"
      << "experiment-ready: " << (experiment_ready ? "yes" : "no") << "\n";
  for (const PerTweet& row : per_tweet) {
    if (!row.has_full_gold)
      out << "  " << row.id << ": missing gold labels\n";
    else if (row.pool_size < required_pool)
      out << "  " << row.id << ": pool " << row.pool_size << " < "
          << required_pool << "\n";
  }
  return out.str();
}

}  // namespace crowdalloc
