#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crowdalloc/corpus.hpp"
#include "crowdalloc/sarcasm.hpp"

namespace crowdalloc {

enum class DifficultyClass { VeryEasy = 0, Easy = 1, Medium = 2, Hard = 3 };
inline constexpr std::array<DifficultyClass, 4> kAllClasses = {
    DifficultyClass::VeryEasy, DifficultyClass::Easy, DifficultyClass::Medium,
    DifficultyClass::Hard};

const char* to_string(DifficultyClass c);
std::optional<DifficultyClass> difficulty_from_string(std::string_view name);

// Everything the decision tree looks at, derived deterministically from a
// tweet and a sarcasm model.
struct TweetMeta {
  std::set<Candidate> mentions;
  int proper_word_count = 0;
  bool has_link = false;
  double sarcasm_score = 0.0;
};

// Alphabetic tokens of >= 2 characters; URLs, @-mentions, hashtags and the
// retweet marker "RT" do not count.
int proper_word_count(std::string_view text);
bool has_link(std::string_view text);

TweetMeta derive_meta(const Tweet& tweet, const SarcasmModel& model);
TweetMeta derive_meta(const Tweet& tweet, const SarcasmModel& model,
                      const ClueConfig& clue_cfg);

enum class Predicate {
  MentionsMultiple,  // more than one candidate mentioned
  MentionsAnyOf,     // any of the argument candidates mentioned
  IsShort,           // proper_word_count < arg
  HasLink,
  SarcasmAtLeast,    // sarcasm_score >= arg
};

// Binary predicate tree over TweetMeta with a DifficultyClass at each leaf.
// Nodes live in a flat vector; index 0 is the root.
class DecisionTree {
 public:
  struct Node {
    bool is_leaf = false;
    DifficultyClass leaf = DifficultyClass::VeryEasy;
    Predicate pred = Predicate::MentionsMultiple;
    std::set<Candidate> arg_candidates;  // MentionsAnyOf
    double arg_number = 0.0;             // IsShort / SarcasmAtLeast
    int if_true = -1;
    int if_false = -1;

    bool operator==(const Node&) const = default;
  };

  DifficultyClass classify(const TweetMeta& meta) const;
  // Index of the leaf node `classify` lands on; used for reachability checks.
  int classify_leaf(const TweetMeta& meta) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::vector<int> leaf_indices() const;

  std::string to_json_string(int indent = 2) const;
  static DecisionTree parse(std::string_view json_text);
  static DecisionTree from_file(const std::filesystem::path& path);
  void to_file(const std::filesystem::path& path) const;

  // Builder API: returns the index of the added node.
  int add_leaf(DifficultyClass cls);
  int add_node(Predicate pred, std::set<Candidate> arg_candidates,
               double arg_number, int if_true, int if_false);

  bool operator==(const DecisionTree&) const = default;

 private:
  void validate() const;
  std::vector<Node> nodes_;
};

// Reconstruction of the static-tree factors: score one point each for
// multiple candidates, a Clinton/Trump mention, short-or-linked text, and a
// sarcasm score >= tau; 0/1/2/3+ points map to VeryEasy/Easy/Medium/Hard.
DecisionTree default_tree(double tau);

inline constexpr int kShortTweetProperWords = 10;

}  // namespace crowdalloc
