#include "crowdalloc/difficulty.hpp"

#include <fstream>
#include <functional>

#include <json.hpp>

#include "crowdalloc/text.hpp"

namespace crowdalloc {

using nlohmann::json;

const char* to_string(DifficultyClass c) {
  switch (c) {
    case DifficultyClass::VeryEasy: return "VeryEasy";
    case DifficultyClass::Easy: return "Easy";
    case DifficultyClass::Medium: return "Medium";
    case DifficultyClass::Hard: return "Hard";
  }
  return "?";
}

std::optional<DifficultyClass> difficulty_from_string(std::string_view name) {
  std::string lower = to_lower(name);
  for (DifficultyClass c : kAllClasses)
    if (lower == to_lower(to_string(c))) return c;
  return std::nullopt;
}

bool has_link(std::string_view text) {
  std::string lower = to_lower(text);
  return contains(lower, "http://") || contains(lower, "https://") ||
         contains(lower, "www.");
}

int proper_word_count(std::string_view text) {
  int count = 0;
  for (const std::string& raw : whitespace_tokens(text)) {
    std::string lower = to_lower(raw);
    if (std::string_view(lower).starts_with("http://") ||
        std::string_view(lower).starts_with("https://") ||
        std::string_view(lower).starts_with("www."))
      continue;
    if (raw[0] == '@' || raw[0] == '#') continue;
    std::string_view token = strip_punct(raw);
    if (token == "RT") continue;
    if (token.size() >= 2 && is_all_alpha(token)) ++count;
  }
  return count;
}

TweetMeta derive_meta(const Tweet& tweet, const SarcasmModel& model) {
  return derive_meta(tweet, model, default_clue_config());
}

TweetMeta derive_meta(const Tweet& tweet, const SarcasmModel& model,
                      const ClueConfig& clue_cfg) {
  if (tweet.mentions.empty())
    throw Error("derive_meta: tweet '" + tweet.id + "' mentions no candidate");
  TweetMeta meta;
  meta.mentions = tweet.mentions;
  meta.proper_word_count = proper_word_count(tweet.text);
  meta.has_link = has_link(tweet.text);
  meta.sarcasm_score = score(model, extract_features(tweet.text, clue_cfg));
  return meta;
}

namespace {

bool eval_predicate(const DecisionTree::Node& node, const TweetMeta& meta) {
  switch (node.pred) {
    case Predicate::MentionsMultiple:
      return meta.mentions.size() > 1;
    case Predicate::MentionsAnyOf:
      for (Candidate c : node.arg_candidates)
        if (meta.mentions.count(c)) return true;
      return false;
    case Predicate::IsShort:
      return meta.proper_word_count < static_cast<int>(node.arg_number);
    case Predicate::HasLink:
      return meta.has_link;
    case Predicate::SarcasmAtLeast:
      return meta.sarcasm_score >= node.arg_number;
  }
  return false;
}

const char* predicate_name(Predicate p) {
  switch (p) {
    case Predicate::MentionsMultiple: return "mentions_multiple";
    case Predicate::MentionsAnyOf: return "mentions_any_of";
    case Predicate::IsShort: return "is_short";
    case Predicate::HasLink: return "has_link";
    case Predicate::SarcasmAtLeast: return "sarcasm_at_least";
  }
  return "?";
}

std::optional<Predicate> predicate_from_name(std::string_view name) {
  for (Predicate p :
       {Predicate::MentionsMultiple, Predicate::MentionsAnyOf,
        Predicate::IsShort, Predicate::HasLink, Predicate::SarcasmAtLeast})
    if (name == predicate_name(p)) return p;
  return std::nullopt;
}

}  // namespace

int DecisionTree::classify_leaf(const TweetMeta& meta) const {
  int i = 0;
  while (!nodes_.at(i).is_leaf) {
    const Node& node = nodes_[i];
    i = eval_predicate(node, meta) ? node.if_true : node.if_false;
  }
  return i;
}

DifficultyClass DecisionTree::classify(const TweetMeta& meta) const {
  return nodes_.at(classify_leaf(meta)).leaf;
}

std::vector<int> DecisionTree::leaf_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].is_leaf) out.push_back(static_cast<int>(i));
  return out;
}

int DecisionTree::add_leaf(DifficultyClass cls) {
  Node node;
  node.is_leaf = true;
  node.leaf = cls;
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

int DecisionTree::add_node(Predicate pred, std::set<Candidate> arg_candidates,
                           double arg_number, int if_true, int if_false) {
  Node node;
  node.pred = pred;
  node.arg_candidates = std::move(arg_candidates);
  node.arg_number = arg_number;
  node.if_true = if_true;
  node.if_false = if_false;
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

void DecisionTree::validate() const {
  if (nodes_.empty()) throw Error("decision tree: empty");
  const int n = static_cast<int>(nodes_.size());
  for (const Node& node : nodes_) {
    if (node.is_leaf) continue;
    if (node.if_true < 0 || node.if_true >= n || node.if_false < 0 ||
        node.if_false >= n)
      throw Error("decision tree: node child out of range");
  }
  // Finite paths: the JSON form is a tree, and parse() emits children after
  // parents, so child indices above the parent's guarantee termination.
  std::function<void(int, int)> walk = [&](int i, int depth) {
    if (depth > n) throw Error("decision tree: cycle detected");
    const Node& node = nodes_.at(i);
    if (node.is_leaf) return;
    walk(node.if_true, depth + 1);
    walk(node.if_false, depth + 1);
  };
  walk(0, 0);
}

namespace {

json node_to_json(const std::vector<DecisionTree::Node>& nodes, int i) {
  const DecisionTree::Node& node = nodes.at(i);
  json doc;
  if (node.is_leaf) {
    doc["leaf"] = to_string(node.leaf);
    return doc;
  }
  doc["predicate"] = predicate_name(node.pred);
  if (node.pred == Predicate::MentionsAnyOf) {
    json arr = json::array();
    for (Candidate c : node.arg_candidates) arr.push_back(to_string(c));
    doc["arg"] = arr;
  } else if (node.pred == Predicate::IsShort ||
             node.pred == Predicate::SarcasmAtLeast) {
    doc["arg"] = node.arg_number;
  }
  doc["true"] = node_to_json(nodes, node.if_true);
  doc["false"] = node_to_json(nodes, node.if_false);
  return doc;
}

int node_from_json(const json& doc, DecisionTree& tree) {
  if (!doc.is_object()) throw Error("decision tree: node must be an object");
  if (doc.contains("leaf")) {
    auto cls = difficulty_from_string(doc.at("leaf").get<std::string>());
    if (!cls)
      throw Error("decision tree: unknown class '" +
                  doc.at("leaf").get<std::string>() + "'");
    return tree.add_leaf(*cls);
  }
  if (!doc.contains("predicate"))
    throw Error("decision tree: non-leaf node without predicate");
  const std::string name = doc.at("predicate").get<std::string>();
  auto pred = predicate_from_name(name);
  if (!pred) throw Error("decision tree: unknown predicate '" + name + "'");
  if (!doc.contains("true") || !doc.contains("false"))
    throw Error("decision tree: node '" + name + "' missing child");

  std::set<Candidate> candidates;
  double number = 0.0;
  if (*pred == Predicate::MentionsAnyOf) {
    if (!doc.contains("arg"))
      throw Error("decision tree: mentions_any_of requires an arg");
    for (const auto& v : doc.at("arg")) {
      auto cand = candidate_from_string(v.get<std::string>());
      if (!cand)
        throw Error("decision tree: unknown candidate '" +
                    v.get<std::string>() + "'");
      candidates.insert(*cand);
    }
  } else if (*pred == Predicate::IsShort || *pred == Predicate::SarcasmAtLeast) {
    if (!doc.contains("arg"))
      throw Error("decision tree: " + name + " requires an arg");
    number = doc.at("arg").get<double>();
  }
  int if_true = node_from_json(doc.at("true"), tree);
  int if_false = node_from_json(doc.at("false"), tree);
  return tree.add_node(*pred, std::move(candidates), number, if_true, if_false);
}

}  // namespace

std::string DecisionTree::to_json_string(int indent) const {
  return node_to_json(nodes_, 0).dump(indent);
}

DecisionTree DecisionTree::parse(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(std::string("decision tree: malformed JSON: ") + e.what());
  }
  // Children are emitted before their parent, so the JSON root lands at the
  // back; rotate it to index 0.
  DecisionTree scratch;
  int root = node_from_json(doc, scratch);
  DecisionTree tree;
  std::function<int(int)> copy = [&](int i) -> int {
    const Node& node = scratch.nodes_.at(i);
    if (node.is_leaf) return tree.add_leaf(node.leaf);
    // Allocate the parent first so the root becomes index 0.
    int self = tree.add_node(node.pred, node.arg_candidates, node.arg_number,
                             -1, -1);
    tree.nodes_[self].if_true = copy(node.if_true);
    tree.nodes_[self].if_false = copy(node.if_false);
    return self;
  };
  copy(root);
  tree.validate();
  return tree;
}

DecisionTree DecisionTree::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tree file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return parse(text);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void DecisionTree::to_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write tree file: " + path.string());
  out << to_json_string() << "\n";
}

namespace {

DifficultyClass class_for_points(int points) {
  switch (points) {
    case 0: return DifficultyClass::VeryEasy;
    case 1: return DifficultyClass::Easy;
    case 2: return DifficultyClass::Medium;
    default: return DifficultyClass::Hard;
  }
}

// Factors in branch order: candidate count, Clinton/Trump, length/link,
// sarcasm.  Each contributes one difficulty point; the leaf class is the
// point total.  Built in the JSON form so the result is laid out exactly as
// parse() would lay it out.
json default_subtree(int factor, int points, double tau) {
  if (factor == 4) return json{{"leaf", to_string(class_for_points(points))}};
  json yes = default_subtree(factor + 1, points + 1, tau);
  json no = default_subtree(factor + 1, points, tau);
  switch (factor) {
    case 0:
      return json{{"predicate", "mentions_multiple"}, {"true", yes}, {"false", no}};
    case 1:
      return json{{"predicate", "mentions_any_of"},
                  {"arg", json::array({"Clinton", "Trump"})},
                  {"true", yes},
                  {"false", no}};
    case 2: {
      // short OR link: test is_short first, fall through to has_link.
      json link = json{{"predicate", "has_link"}, {"true", yes}, {"false", no}};
      return json{{"predicate", "is_short"},
                  {"arg", kShortTweetProperWords},
                  {"true", yes},
                  {"false", link}};
    }
    default:
      return json{{"predicate", "sarcasm_at_least"},
                  {"arg", tau},
                  {"true", yes},
                  {"false", no}};
  }
}

}  // namespace

DecisionTree default_tree(double tau) {
  return DecisionTree::parse(default_subtree(0, 0, tau).dump());
}

}  // namespace crowdalloc
