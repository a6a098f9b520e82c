#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crowdalloc {

// A worker-allocation scheme under the binary error model: either a fixed
// odd-sized jury, or an initial jury that grows by `extra` workers when the
// first round is not unanimous.
struct Scheme {
  enum class Kind { Fixed, Dynamic };
  Kind kind = Kind::Fixed;
  int fixed_k = 1;   // Fixed: odd, >= 1
  int initial = 2;   // Dynamic: >= 2
  int extra = 1;     // Dynamic: >= 1

  static Scheme fixed(int k);
  static Scheme dynamic(int initial, int extra);
  // "trad3", "trad5", ... and "dyn3+2", "dyn2+3", ...
  static Scheme from_name(std::string_view name);

  std::string name() const;
  int max_workers() const;

  bool operator==(const Scheme&) const = default;
};

// P_M for a fixed odd jury of k: sum_{i=ceil(k/2)}^{k} C(k,i) p^i (1-p)^(k-i).
double pm_fixed(int k, double p);

// Closed-form P_M for Dynamic(n, m): the first round ends it when unanimous
// (all n correct or, under the binary error model, all n wrong); otherwise
// the majority over all n+m ballots decides, even splits resolved by a fair
// coin.  For Dynamic(3,2) this reduces to p^3[10(1-p)^2 + 5p(1-p) + p^2].
double pm_dynamic(const Scheme& s, double p);

double pm(const Scheme& s, double p);

// Independent oracle: exact sum over all 2^N correct/wrong outcome
// sequences, applying the stopping rule and majority decision per sequence.
// N = total workers, capped at 20.
double enumerate_scheme(const Scheme& s, double p);

// Sum of all enumerated sequence weights; equals 1 for any scheme and p.
double enumerate_total_weight(const Scheme& s, double p);

// Probability that n binary-error workers are unanimous: p^n + (1-p)^n.
double unanimity_probability(int n, double p);

// Expected task count over n_items.  Exactly one of p and u may be given:
// u is the observed unanimity rate; p derives it via the binary model.
// Fixed(k) ignores both.
double expected_tasks(const Scheme& s, std::optional<double> p,
                      std::optional<double> u, double n_items);

struct CurveRow {
  double p = 0.0;
  std::string scheme;
  double pm = 0.0;
  double expected_tasks_per_item = 0.0;
};

std::vector<CurveRow> curve(std::span<const Scheme> schemes,
                            std::span<const double> p_grid);

std::string curve_csv(std::span<const CurveRow> rows);

}  // namespace crowdalloc
