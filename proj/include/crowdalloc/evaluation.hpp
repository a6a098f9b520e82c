#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crowdalloc/corpus.hpp"

namespace crowdalloc {

struct RatingPair {
  Sentiment gold;
  Sentiment predicted;
};

// Cohen's kappa over {positive, neutral, negative}: (p_o - p_e) / (1 - p_e).
// Computed from integer confusion counts as (N*diag - sum r_i*c_i) /
// (N^2 - sum r_i*c_i) so fixtures with rational kappa come out exact.
// Returns 1 in the degenerate single-category case (p_o = p_e = 1).
double cohens_kappa(std::span<const RatingPair> pairs);

double percent_agreement(std::span<const RatingPair> pairs);

// total_tasks * price_per_task, exact.
double budget(long total_tasks, double price_per_task);

// Candidate x sentiment counts with row and column sums (the shape of the
// crowd/expert sentiment tables).
struct SentimentTable {
  // [candidate][sentiment]
  std::array<std::array<long, 3>, 4> counts{};

  long candidate_total(Candidate c) const;
  long sentiment_total(Sentiment s) const;
  long grand_total() const;

  std::string to_csv() const;
  std::string to_text(const std::string& title) const;
};

SentimentTable sentiment_distribution(
    std::span<const std::pair<Candidate, Sentiment>> labels);

struct DurationStats {
  size_t count = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double bucket_lo = 1.0;
  double bucket_hi = 600.0;
  std::vector<long> histogram;  // fixed-width buckets over [bucket_lo, bucket_hi]

  bool empty() const { return count == 0; }
  std::string to_csv() const;
  std::string summary() const;
};

DurationStats duration_stats(std::span<const double> durations_s,
                             double lo = 1.0, double hi = 600.0,
                             int buckets = 60);

}  // namespace crowdalloc
