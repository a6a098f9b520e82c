#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crowdalloc/corpus.hpp"
#include "crowdalloc/difficulty.hpp"
#include "crowdalloc/rng.hpp"

namespace crowdalloc {

enum class Trigger { Never, NotUnanimous };

// Worker counts for one difficulty class: `initial` on round one, plus
// `second_round` more when the trigger fires.
struct RoundSpec {
  int initial = 1;
  int second_round = 0;
  Trigger trigger = Trigger::Never;

  bool operator==(const RoundSpec&) const = default;
};

struct AllocationPolicy {
  std::string name;
  std::array<RoundSpec, 4> table{};  // indexed by DifficultyClass

  const RoundSpec& spec(DifficultyClass c) const {
    return table[static_cast<size_t>(c)];
  }
  // Largest number of labels this policy can request for a tweet of class c.
  int max_request(DifficultyClass c) const {
    return spec(c).initial + spec(c).second_round;
  }

  static AllocationPolicy trad(int k);
  static AllocationPolicy sdt();
  static AllocationPolicy ddt1();
  static AllocationPolicy ddt2();

  static AllocationPolicy from_json_string(std::string_view text);
  static AllocationPolicy from_file(const std::filesystem::path& path);
  std::string to_json_string(int indent = 2) const;

  bool operator==(const AllocationPolicy&) const = default;
};

// Built-in tables by name: trad<k> | sdt | ddt1 | ddt2.
AllocationPolicy policy_table(std::string_view name);

// True iff every mentioned candidate got identical labels across records.
bool unanimous(const std::set<Candidate>& mentions,
               std::span<const LabelRecord> records);

// Second round fires when the class has one configured and any mentioned
// candidate is not unanimous after round one.
bool needs_second_round(const RoundSpec& spec,
                        const std::set<Candidate>& mentions,
                        std::span<const LabelRecord> collected);

// Modal label; ties are broken uniformly among exactly the tied labels using
// the supplied stream.  `tie_out`, when given, reports whether a tie-break
// happened.
Sentiment majority_vote(std::span<const Sentiment> labels, Rng& rng,
                        bool* tie_out = nullptr);

// Supplies worker labels for one tweet.  Implementations: the synthetic
// worker model and the replay sampler (simulation.hpp).
class LabelSource {
 public:
  virtual ~LabelSource() = default;
  // Draws n fresh records for the tweet in the given round (0 or 1); throws
  // Error on exhaustion.
  virtual std::vector<LabelRecord> draw(const Tweet& tweet,
                                        DifficultyClass cls, int n, int round,
                                        Rng& rng) = 0;
  // Labels still available for the tweet; SIZE_MAX when unbounded.
  virtual size_t capacity(const std::string& tweet_id) const = 0;
};

// Per-tweet progress through the rounds.
struct RoundState {
  enum class Round { First, Second, Done };
  std::string tweet_id;
  DifficultyClass cls = DifficultyClass::VeryEasy;
  Round round = Round::First;
  std::vector<LabelRecord> collected;
  int tasks_used = 0;
};

struct TweetOutcome {
  std::string tweet_id;
  DifficultyClass cls = DifficultyClass::VeryEasy;
  int tasks_used = 0;
  std::map<Candidate, Sentiment> final_labels;
  bool tie = false;

  std::string to_json_line() const;
};

struct AllocationOutcome {
  std::vector<TweetOutcome> per_tweet;  // in corpus tweet order
  long total_tasks = 0;
  long tie_events = 0;
};

using ClassMap = std::unordered_map<std::string, DifficultyClass>;

struct RunOptions {
  uint32_t run_index = 0;
  int threads = 1;
  // Whether second-round ballots count for every candidate or only the
  // disputed ones.  The whole-tweet reading matches one-HIT-per-worker task
  // accounting; the alternative is available but not claimed faithful.
  enum class SecondRoundScope { WholeTweet, DisputedOnly };
  SecondRoundScope scope = SecondRoundScope::WholeTweet;
};

// Runs a policy over every tweet: draw the initial round, fire the trigger
// where configured, draw the second round, aggregate by per-candidate
// majority vote.  Deterministic for fixed (policy, corpus, source state,
// seed) at any thread count.
AllocationOutcome run_policy(const AllocationPolicy& policy,
                             const Corpus& corpus, const ClassMap& classes,
                             LabelSource& source, uint64_t seed,
                             const RunOptions& options = {});

void save_outcomes(const AllocationOutcome& outcome,
                   const std::filesystem::path& path);

}  // namespace crowdalloc
