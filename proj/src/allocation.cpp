#include "crowdalloc/allocation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "crowdalloc/text.hpp"

namespace crowdalloc {

using nlohmann::json;

namespace {

RoundSpec make_spec(int initial, int second) {
  RoundSpec spec;
  spec.initial = initial;
  spec.second_round = second;
  spec.trigger = second > 0 ? Trigger::NotUnanimous : Trigger::Never;
  return spec;
}

size_t idx(DifficultyClass c) { return static_cast<size_t>(c); }

}  // namespace

AllocationPolicy AllocationPolicy::trad(int k) {
  if (k < 1) throw Error("trad policy needs k >= 1");
  AllocationPolicy p;
  p.name = "trad" + std::to_string(k);
  p.table.fill(make_spec(k, 0));
  return p;
}

AllocationPolicy AllocationPolicy::sdt() {
  AllocationPolicy p;
  p.name = "sdt";
  p.table[idx(DifficultyClass::VeryEasy)] = make_spec(2, 0);
  p.table[idx(DifficultyClass::Easy)] = make_spec(3, 0);
  p.table[idx(DifficultyClass::Medium)] = make_spec(5, 0);
  p.table[idx(DifficultyClass::Hard)] = make_spec(7, 0);
  return p;
}

AllocationPolicy AllocationPolicy::ddt1() {
  AllocationPolicy p;
  p.name = "ddt1";
  p.table[idx(DifficultyClass::VeryEasy)] = make_spec(2, 1);
  p.table[idx(DifficultyClass::Easy)] = make_spec(2, 1);
  p.table[idx(DifficultyClass::Medium)] = make_spec(3, 2);
  p.table[idx(DifficultyClass::Hard)] = make_spec(5, 0);
  return p;
}

AllocationPolicy AllocationPolicy::ddt2() {
  AllocationPolicy p;
  p.name = "ddt2";
  p.table[idx(DifficultyClass::VeryEasy)] = make_spec(2, 3);
  p.table[idx(DifficultyClass::Easy)] = make_spec(2, 3);
  p.table[idx(DifficultyClass::Medium)] = make_spec(3, 2);
  p.table[idx(DifficultyClass::Hard)] = make_spec(3, 2);
  return p;
}

AllocationPolicy policy_table(std::string_view name) {
  std::string lower = to_lower(name);
  if (lower == "sdt") return AllocationPolicy::sdt();
  if (lower == "ddt1") return AllocationPolicy::ddt1();
  if (lower == "ddt2") return AllocationPolicy::ddt2();
  if (lower.starts_with("trad")) {
    int k = 0;
    if (sscanf(lower.c_str(), "trad%d", &k) == 1 &&
        lower == "trad" + std::to_string(k))
      return AllocationPolicy::trad(k);
  }
  throw Error("unknown policy '" + std::string(name) +
              "' (expected tradK, sdt, ddt1 or ddt2)");
}

AllocationPolicy AllocationPolicy::from_json_string(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("policy: malformed JSON: ") + e.what());
  }
  AllocationPolicy p;
  try {
    p.name = doc.value("name", "custom");
    const json& table = doc.at("table");
    for (DifficultyClass c : kAllClasses) {
      const json& row = table.at(to_string(c));
      RoundSpec spec;
      spec.initial = row.at("initial").get<int>();
      spec.second_round = row.value("second_round", 0);
      std::string trigger = row.value(
          "trigger", spec.second_round > 0 ? "not_unanimous" : "never");
      if (trigger == "never")
        spec.trigger = Trigger::Never;
      else if (trigger == "not_unanimous")
        spec.trigger = Trigger::NotUnanimous;
      else
        throw Error("policy: unknown trigger '" + trigger + "'");
      if (spec.initial < 1) throw Error("policy: initial count must be >= 1");
      if (spec.second_round < 0)
        throw Error("policy: second_round count must be >= 0");
      p.table[idx(c)] = spec;
    }
  } catch (const json::exception& e) {
    throw Error(std::string("policy: ") + e.what());
  }
  return p;
}

AllocationPolicy AllocationPolicy::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open policy file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return from_json_string(text);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string AllocationPolicy::to_json_string(int indent) const {
  json table = json::object();
  for (DifficultyClass c : kAllClasses) {
    const RoundSpec& spec = this->spec(c);
    table[to_string(c)] = {
        {"initial", spec.initial},
        {"second_round", spec.second_round},
        {"trigger",
         spec.trigger == Trigger::NotUnanimous ? "not_unanimous" : "never"}};
  }
  return json{{"name", name}, {"table", table}}.dump(indent);
}

bool unanimous(const std::set<Candidate>& mentions,
               std::span<const LabelRecord> records) {
  for (Candidate cand : mentions) {
    std::optional<Sentiment> seen;
    for (const LabelRecord& rec : records) {
      auto it = rec.labels.find(cand);
      if (it == rec.labels.end()) continue;
      if (!seen) {
        seen = it->second;
      } else if (*seen != it->second) {
        return false;
      }
    }
  }
  return true;
}

bool needs_second_round(const RoundSpec& spec,
                        const std::set<Candidate>& mentions,
                        std::span<const LabelRecord> collected) {
  if (spec.second_round <= 0 || spec.trigger != Trigger::NotUnanimous)
    return false;
  return !unanimous(mentions, collected);
}

Sentiment majority_vote(std::span<const Sentiment> labels, Rng& rng,
                        bool* tie_out) {
  if (labels.empty()) throw Error("majority_vote: no labels");
  std::array<int, 3> counts{};
  for (Sentiment s : labels) ++counts[static_cast<size_t>(s)];
  int best = *std::max_element(counts.begin(), counts.end());
  // Tied labels in canonical order, so the draw below is scheduling-free.
  std::vector<Sentiment> tied;
  for (Sentiment s : kAllSentiments)
    if (counts[static_cast<size_t>(s)] == best) tied.push_back(s);
  if (tie_out) *tie_out = tied.size() > 1;
  if (tied.size() == 1) return tied.front();
  return tied[rng.below(tied.size())];
}

namespace {

// Sequential over a contiguous index block per thread; identical results at
// any thread count because outputs land in per-index slots.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  if (threads <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  size_t t = std::min<size_t>(threads, n);
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (size_t w = 0; w < t; ++w) {
    pool.emplace_back([&, w] {
      size_t lo = n * w / t, hi = n * (w + 1) / t;
      try {
        for (size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

AllocationOutcome run_policy(const AllocationPolicy& policy,
                             const Corpus& corpus, const ClassMap& classes,
                             LabelSource& source, uint64_t seed,
                             const RunOptions& options) {
  AllocationOutcome outcome;
  outcome.per_tweet.resize(corpus.tweets.size());
  std::vector<long> ties(corpus.tweets.size(), 0);

  parallel_for(
      corpus.tweets.size(), options.threads,
      [&](size_t i) {
        const Tweet& tweet = corpus.tweets[i];
        auto cls_it = classes.find(tweet.id);
        if (cls_it == classes.end())
          throw Error("run_policy: no difficulty class for tweet '" +
                      tweet.id + "'");
        RoundState state;
        state.tweet_id = tweet.id;
        state.cls = cls_it->second;
        const RoundSpec& spec = policy.spec(state.cls);

        Rng first_rng = stream_rng(seed, options.run_index, tweet.id,
                                   StreamPurpose::FirstRound);
        state.collected = source.draw(tweet, state.cls, spec.initial, 0, first_rng);
        if (state.collected.size() != static_cast<size_t>(spec.initial))
          throw Error("label source returned " +
                      std::to_string(state.collected.size()) + " records, " +
                      std::to_string(spec.initial) + " requested");
        state.tasks_used = spec.initial;
        state.round = RoundState::Round::Second;

        size_t first_round_size = state.collected.size();
        bool second = needs_second_round(spec, tweet.mentions, state.collected);
        if (second) {
          Rng second_rng = stream_rng(seed, options.run_index, tweet.id,
                                      StreamPurpose::SecondRound);
          auto extra =
              source.draw(tweet, state.cls, spec.second_round, 1, second_rng);
          if (extra.size() != static_cast<size_t>(spec.second_round))
            throw Error("label source returned " +
                        std::to_string(extra.size()) + " records, " +
                        std::to_string(spec.second_round) + " requested");
          state.tasks_used += spec.second_round;
          state.collected.insert(state.collected.end(), extra.begin(),
                                 extra.end());
        }
        state.round = RoundState::Round::Done;

        // Which candidates the second round may speak for.
        std::set<Candidate> disputed;
        if (second && options.scope == RunOptions::SecondRoundScope::DisputedOnly) {
          std::span<const LabelRecord> first_span(state.collected.data(),
                                                  first_round_size);
          for (Candidate cand : tweet.mentions)
            if (!unanimous({cand}, first_span)) disputed.insert(cand);
        }

        TweetOutcome& row = outcome.per_tweet[i];
        row.tweet_id = tweet.id;
        row.cls = state.cls;
        row.tasks_used = state.tasks_used;
        Rng tie_rng = stream_rng(seed, options.run_index, tweet.id,
                                 StreamPurpose::TieBreak);
        for (Candidate cand : tweet.mentions) {
          std::vector<Sentiment> votes;
          for (size_t r = 0; r < state.collected.size(); ++r) {
            if (r >= first_round_size &&
                options.scope == RunOptions::SecondRoundScope::DisputedOnly &&
                !disputed.count(cand))
              continue;
            auto it = state.collected[r].labels.find(cand);
            if (it != state.collected[r].labels.end()) votes.push_back(it->second);
          }
          bool tie = false;
          row.final_labels[cand] = majority_vote(votes, tie_rng, &tie);
          if (tie) {
            row.tie = true;
            ++ties[i];
          }
        }
      });

  for (size_t i = 0; i < outcome.per_tweet.size(); ++i) {
    outcome.total_tasks += outcome.per_tweet[i].tasks_used;
    outcome.tie_events += ties[i];
  }
  return outcome;
}

std::string TweetOutcome::to_json_line() const {
  json labels = json::object();
  for (const auto& [cand, sent] : final_labels)
    labels[to_string(cand)] = to_string(sent);
  json doc = {{"tweet_id", tweet_id},
              {"class", to_string(cls)},
              {"tasks_used", tasks_used},
              {"final_labels", labels},
              {"tie", tie}};
  return doc.dump();
}

void save_outcomes(const AllocationOutcome& outcome,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write outcome file: " + path.string());
  for (const TweetOutcome& row : outcome.per_tweet)
    out << row.to_json_line() << "\n";
}

}  // namespace crowdalloc
