// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion.  Exit code = number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "crowdalloc/allocation.hpp"
#include "crowdalloc/analytics.hpp"
#include "crowdalloc/demo.hpp"
#include "crowdalloc/evaluation.hpp"
#include "crowdalloc/rng.hpp"
#include "crowdalloc/sarcasm.hpp"
#include "crowdalloc/simulation.hpp"

using namespace crowdalloc;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// ---- 1. closed-form equivalence of trad5 and dyn3+2 -----------------------

Check criterion_equivalence() {
  Check check;
  auto start = std::chrono::steady_clock::now();
  Scheme dyn = Scheme::dynamic(3, 2);
  Scheme trad5 = Scheme::fixed(5);
  double worst = 0.0, worst_oracle = 0.0;
  for (int i = 0; i <= 100; ++i) {
    double p = i / 100.0;
    double a = pm_fixed(5, p);
    double b = pm_dynamic(dyn, p);
    worst = std::max(worst, std::abs(a - b));
    worst_oracle = std::max(worst_oracle,
                            std::abs(a - enumerate_scheme(trad5, p)));
    worst_oracle = std::max(worst_oracle, std::abs(b - enumerate_scheme(dyn, p)));
  }
  double elapsed = seconds_since(start);
  check.expect(worst <= 1e-12, "closed forms differ by " + std::to_string(worst));
  check.expect(worst_oracle <= 1e-12,
               "oracle differs by " + std::to_string(worst_oracle));
  check.expect(elapsed < 1.0, "took " + std::to_string(elapsed) + "s");
  char buf[96];
  snprintf(buf, sizeof buf, "max|trad5-dyn3+2|=%.2e, max|closed-oracle|=%.2e, %.3fs",
           worst, worst_oracle, elapsed);
  check.note(buf);
  return check;
}

// ---- 2. enumeration-oracle agreement on the named schemes -----------------

Check criterion_oracle_agreement() {
  Check check;
  auto start = std::chrono::steady_clock::now();
  const double ps[] = {0.3, 0.5, 0.7, 0.9};
  double worst = 0.0;
  for (int k : {1, 3, 5, 7})
    for (double p : ps)
      worst = std::max(
          worst, std::abs(pm_fixed(k, p) - enumerate_scheme(Scheme::fixed(k), p)));
  // dyn3+2 appears twice on purpose: once as the VE/E shape, once as the
  // medium/hard shape of the second dynamic table.
  for (Scheme s : {Scheme::dynamic(3, 2), Scheme::dynamic(2, 1),
                   Scheme::dynamic(2, 3), Scheme::dynamic(3, 2)})
    for (double p : ps)
      worst = std::max(worst, std::abs(pm_dynamic(s, p) - enumerate_scheme(s, p)));
  double elapsed = seconds_since(start);
  check.expect(worst <= 1e-12, "worst gap " + std::to_string(worst));
  check.expect(elapsed < 1.0, "took " + std::to_string(elapsed) + "s");
  char buf[64];
  snprintf(buf, sizeof buf, "worst gap %.2e, %.3fs", worst, elapsed);
  check.note(buf);
  return check;
}

// ---- 3. Monte Carlo consistency at one million items ----------------------

Check criterion_monte_carlo() {
  Check check;
  auto start = std::chrono::steady_clock::now();
  const double target = 0.83692;
  double dyn = simulate_scheme_accuracy(Scheme::dynamic(3, 2), 0.7, 1000000, 20260809);
  double fixed = simulate_scheme_accuracy(Scheme::fixed(5), 0.7, 1000000, 20260809);
  double elapsed = seconds_since(start);
  check.expect(std::abs(dyn - target) <= 0.002,
               "dyn3+2 off by " + std::to_string(std::abs(dyn - target)));
  check.expect(std::abs(fixed - target) <= 0.002,
               "trad5 off by " + std::to_string(std::abs(fixed - target)));
  check.expect(elapsed < 60.0, "took " + std::to_string(elapsed) + "s");
  char buf[96];
  snprintf(buf, sizeof buf, "dyn3+2=%.5f, trad5=%.5f vs %.5f, %.1fs", dyn,
           fixed, target, elapsed);
  check.note(buf);
  return check;
}

// ---- 4. the 4,058-task / 18.84% budget arithmetic --------------------------

Check criterion_budget_arithmetic() {
  Check check;
  double tasks = expected_tasks(Scheme::dynamic(3, 2), std::nullopt, 0.471, 1000);
  double savings = (5000.0 - tasks) / 5000.0;
  check.expect(tasks == 4058.0, "expected_tasks = " + std::to_string(tasks));
  check.expect(savings == 0.1884, "savings = " + std::to_string(savings));
  char buf[64];
  snprintf(buf, sizeof buf, "tasks=%.0f, savings=%.2f%%", tasks, savings * 100);
  check.note(buf);
  return check;
}

// ---- 5. replay task counts are exact ---------------------------------------

Check criterion_task_exactness(const DemoCorpus& demo) {
  Check check;
  for (auto [name, expected] : {std::pair<const char*, long>{"trad3", 3000},
                                std::pair<const char*, long>{"trad5", 5000}}) {
    ReplaySampler source(demo.corpus);
    AllocationOutcome outcome =
        run_policy(policy_table(name), demo.corpus, demo.classes, source, 5);
    check.expect(outcome.total_tasks == expected,
                 std::string(name) + " gave " +
                     std::to_string(outcome.total_tasks) + " tasks");
  }
  // k * N on a second corpus shape
  DemoCorpus other = make_demo_corpus(137, 10, 4242);
  ReplaySampler source(other.corpus);
  AllocationOutcome outcome =
      run_policy(policy_table("trad7"), other.corpus, other.classes, source, 5);
  check.expect(outcome.total_tasks == 7 * 137,
               "trad7 on 137 tweets gave " + std::to_string(outcome.total_tasks));
  check.note("trad3=3000, trad5=5000 on N=1000; trad7=959 on N=137");
  return check;
}

// ---- 6. end-to-end ordering of the five methods ----------------------------

Check criterion_ordering(const DemoCorpus& demo) {
  Check check;
  auto start = std::chrono::steady_clock::now();
  ExperimentConfig config;
  for (const char* name : {"trad3", "trad5", "sdt", "ddt1", "ddt2"})
    config.policies.push_back(policy_table(name));
  config.runs = 5;
  config.seed = 20260809;
  config.threads = 4;
  config.worker_model.accuracy = {0.9, 0.8, 0.7, 0.6};
  EvalReport report = run_experiment(config, demo.corpus, demo.classes);

  auto mean = [&](const char* name) { return report.mean_row(name); };
  double tasks_ddt1 = mean("ddt1")->total_tasks;
  double tasks_ddt2 = mean("ddt2")->total_tasks;
  double k3 = mean("trad3")->kappa_pooled;
  double k5 = mean("trad5")->kappa_pooled;
  double ksdt = mean("sdt")->kappa_pooled;
  double kddt1 = mean("ddt1")->kappa_pooled;
  double kddt2 = mean("ddt2")->kappa_pooled;
  double elapsed = seconds_since(start);

  check.expect(tasks_ddt1 < tasks_ddt2,
               "tasks ddt1 >= ddt2: " + std::to_string(tasks_ddt1) + " vs " +
                   std::to_string(tasks_ddt2));
  check.expect(tasks_ddt2 < 5000.0,
               "ddt2 tasks not under 5000: " + std::to_string(tasks_ddt2));
  check.expect(k3 <= k5 + 0.01, "kappa trad3 above trad5+0.01");
  check.expect(k5 >= k3 && k5 >= ksdt && k5 >= kddt1,
               "trad5 kappa not highest among {trad3, sdt, ddt1}");
  check.expect(std::abs(kddt2 - k5) <= 0.03,
               "ddt2 kappa off trad5 by " + std::to_string(std::abs(kddt2 - k5)));
  check.expect(elapsed < 120.0, "took " + std::to_string(elapsed) + "s");
  char buf[192];
  snprintf(buf, sizeof buf,
           "tasks ddt1=%.0f < ddt2=%.0f < 5000; kappa t3=%.3f t5=%.3f "
           "sdt=%.3f d1=%.3f d2=%.3f, %.1fs",
           tasks_ddt1, tasks_ddt2, k3, k5, ksdt, kddt1, kddt2, elapsed);
  check.note(buf);
  return check;
}

// ---- 7. sarcasm model fixture and score properties -------------------------

Check criterion_sarcasm() {
  Check check;
  FeatureVector quotes{}, laugh{}, none{};
  quotes[kClueQuotes] = true;
  laugh[kClueLaugh] = true;
  std::vector<std::pair<FeatureVector, bool>> items = {
      {quotes, true}, {laugh, true}, {quotes, false}, {none, false}};
  SarcasmModel model = train(items);
  check.expect(model.weights[kClueQuotes] == 1.0 / 3.0, "quotes weight off");
  check.expect(model.weights[kClueLaugh] == 2.0 / 3.0, "laugh weight off");
  for (int n = 0; n < kClueCount; ++n)
    if (n != kClueQuotes && n != kClueLaugh)
      check.expect(model.weights[n] == 0.0, "unsupported clue has weight");

  Rng rng(20260809);
  bool in_range = true, monotone = true;
  for (int trial = 0; trial < 10000; ++trial) {
    SarcasmModel random_model;
    double total = 0.0;
    for (int n = 0; n < kClueCount; ++n) {
      random_model.cond_prob[n] = rng.uniform();
      total += random_model.cond_prob[n];
    }
    for (int n = 0; n < kClueCount; ++n)
      random_model.weights[n] = random_model.cond_prob[n] / total;
    FeatureVector f{};
    for (int n = 0; n < kClueCount; ++n) f[n] = rng.bernoulli(0.5);
    double s = score(random_model, f);
    in_range = in_range && s >= 0.0 && s <= 1.0 + 1e-12;
    int flip = static_cast<int>(rng.below(kClueCount));
    if (!f[flip]) {
      FeatureVector g = f;
      g[flip] = true;
      monotone = monotone && score(random_model, g) >= s;
    }
  }
  check.expect(in_range, "score escaped [0,1]");
  check.expect(monotone, "score decreased when a feature was added");
  check.note("weights (1/3, 2/3) exact; 10^4 random models in range, monotone");
  return check;
}

// ---- 8. kappa against an independent confusion-matrix oracle ---------------

double kappa_oracle(const std::vector<RatingPair>& pairs) {
  double confusion[3][3] = {};
  for (const RatingPair& pair : pairs)
    confusion[static_cast<int>(pair.gold)][static_cast<int>(pair.predicted)] +=
        1.0;
  double n = static_cast<double>(pairs.size());
  double po = 0.0, pe = 0.0;
  for (int i = 0; i < 3; ++i) {
    po += confusion[i][i] / n;
    double row = 0.0, col = 0.0;
    for (int j = 0; j < 3; ++j) {
      row += confusion[i][j];
      col += confusion[j][i];
    }
    pe += (row / n) * (col / n);
  }
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

Check criterion_kappa() {
  Check check;
  Rng rng(31337);
  double worst = 0.0;
  for (int table = 0; table < 100; ++table) {
    std::vector<RatingPair> pairs;
    for (Sentiment g : kAllSentiments)
      for (Sentiment p : kAllSentiments) {
        int count = static_cast<int>(rng.below(40));
        for (int i = 0; i < count; ++i) pairs.push_back({g, p});
      }
    if (pairs.empty()) pairs.push_back({Sentiment::Neutral, Sentiment::Neutral});
    worst = std::max(worst, std::abs(cohens_kappa(pairs) - kappa_oracle(pairs)));
  }
  check.expect(worst <= 1e-12, "oracle gap " + std::to_string(worst));

  std::vector<RatingPair> fixture;
  for (int i = 0; i < 20; ++i) fixture.push_back({Sentiment::Positive, Sentiment::Positive});
  for (int i = 0; i < 20; ++i) fixture.push_back({Sentiment::Negative, Sentiment::Negative});
  for (int i = 0; i < 10; ++i) fixture.push_back({Sentiment::Positive, Sentiment::Negative});
  for (int i = 0; i < 10; ++i) fixture.push_back({Sentiment::Negative, Sentiment::Positive});
  check.expect(cohens_kappa(fixture) == 1.0 / 3.0, "fixture kappa not 1/3");
  char buf[64];
  snprintf(buf, sizeof buf, "oracle gap %.2e on 100 tables; fixture = 1/3",
           worst);
  check.note(buf);
  return check;
}

// ---- 9. CLI determinism across invocations and thread counts ---------------

int run_cli(const std::string& args) {
  std::string cmd = std::string(CROWDALLOC_CLI_PATH) + " " + args +
                    " > /dev/null 2> /dev/null";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Check criterion_determinism() {
  Check check;
  fs::path dir = fs::temp_directory_path() /
                 ("crowdalloc_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  DemoCorpus demo = make_demo_corpus(200, 10, 9);
  save_tweets(demo.corpus, dir / "tweets.jsonl");
  save_labels(demo.corpus, dir / "labels.jsonl");
  std::string tweets = (dir / "tweets.jsonl").string();
  std::string labels = (dir / "labels.jsonl").string();

  auto simulate = [&](const std::string& out, int threads) {
    return run_cli("simulate --tweets " + tweets +
                   " --policy trad5,ddt1,ddt2 --runs 3 --seed 17 --threads " +
                   std::to_string(threads) + " --out " + (dir / out).string());
  };
  auto replay = [&](const std::string& out, int threads) {
    return run_cli("replay --tweets " + tweets + " --labels " + labels +
                   " --policy trad3,ddt2 --runs 3 --seed 23 --threads " +
                   std::to_string(threads) + " --out " + (dir / out).string());
  };
  check.expect(simulate("s1.csv", 1) == 0, "simulate run 1 failed");
  check.expect(simulate("s2.csv", 1) == 0, "simulate run 2 failed");
  check.expect(simulate("s8.csv", 8) == 0, "simulate threads=8 failed");
  check.expect(replay("r1.csv", 1) == 0, "replay run 1 failed");
  check.expect(replay("r2.csv", 1) == 0, "replay run 2 failed");
  check.expect(replay("r8.csv", 8) == 0, "replay threads=8 failed");

  std::string s1 = slurp(dir / "s1.csv");
  check.expect(!s1.empty() && s1 == slurp(dir / "s2.csv"),
               "simulate not reproducible across invocations");
  check.expect(s1 == slurp(dir / "s8.csv"),
               "simulate differs between threads=1 and threads=8");
  std::string r1 = slurp(dir / "r1.csv");
  check.expect(!r1.empty() && r1 == slurp(dir / "r2.csv"),
               "replay not reproducible across invocations");
  check.expect(r1 == slurp(dir / "r8.csv"),
               "replay differs between threads=1 and threads=8");
  fs::remove_all(dir);
  check.note("simulate and replay byte-identical twice and at threads 1 vs 8");
  return check;
}

// ---- 10. cost accounting ----------------------------------------------------

Check criterion_cost() {
  Check check;
  double cost = budget(5075, 0.05);
  check.expect(cost == 253.75, "budget(5075, 0.05) = " + std::to_string(cost));
  check.note("budget(5075, $0.05) = $253.75 exact");
  return check;
}

}  // namespace

int main() {
  printf("acceptance suite\n================\n");
  DemoCorpus demo = make_demo_corpus(1000, 10, 42);

  struct Criterion {
    const char* title;
    std::function<Check()> fn;
  };
  std::vector<Criterion> criteria = {
      {"1. equivalence of trad5 and dyn3+2 closed forms (<= 1e-12, < 1s)",
       criterion_equivalence},
      {"2. enumeration-oracle agreement (<= 1e-12, < 1s)",
       criterion_oracle_agreement},
      {"3. Monte Carlo consistency at p=0.7, 10^6 items (+-0.002, < 60s)",
       criterion_monte_carlo},
      {"4. expected tasks 4,058 and 18.84% savings, exact",
       criterion_budget_arithmetic},
      {"5. replay task counts exact (trad3=3000, trad5=5000 on N=1000)",
       [&] { return criterion_task_exactness(demo); }},
      {"6. five-method ordering: tasks and kappa structure (< 2min)",
       [&] { return criterion_ordering(demo); }},
      {"7. sarcasm fixture weights exact; score in [0,1], monotone",
       criterion_sarcasm},
      {"8. kappa oracle match (<= 1e-12) and exact 1/3 fixture",
       criterion_kappa},
      {"9. CLI determinism across invocations and threads 1 vs 8",
       criterion_determinism},
      {"10. budget(5075, $0.05) = $253.75 exact", criterion_cost},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Check check;
    try {
      check = criterion.fn();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    printf("%s  %s\n", check.ok ? "PASS" : "FAIL", criterion.title);
    if (!check.detail.empty()) printf("      %s\n", check.detail.c_str());
    if (!check.ok) ++failures;
  }
  printf("================\n%d/%zu criteria passed\n",
         static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
