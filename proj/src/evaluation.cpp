#include "crowdalloc/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "crowdalloc/error.hpp"

namespace crowdalloc {

double cohens_kappa(std::span<const RatingPair> pairs) {
  if (pairs.empty()) throw Error("cohens_kappa: no rating pairs");
  long confusion[3][3] = {};
  for (const RatingPair& pair : pairs)
    ++confusion[static_cast<size_t>(pair.gold)]
               [static_cast<size_t>(pair.predicted)];

  long n = static_cast<long>(pairs.size());
  long diagonal = 0;
  long chance = 0;  // sum over categories of row_total * col_total
  for (int i = 0; i < 3; ++i) {
    diagonal += confusion[i][i];
    long row = 0, col = 0;
    for (int j = 0; j < 3; ++j) {
      row += confusion[i][j];
      col += confusion[j][i];
    }
    chance += row * col;
  }
  // kappa = (p_o - p_e) / (1 - p_e), scaled by n^2 so integer counts stay
  // exact.  denominator 0 means both raters sit on one shared category.
  long numerator = n * diagonal - chance;
  long denominator = n * n - chance;
  if (denominator == 0) return 1.0;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

double percent_agreement(std::span<const RatingPair> pairs) {
  if (pairs.empty()) throw Error("percent_agreement: no rating pairs");
  long agree = 0;
  for (const RatingPair& pair : pairs)
    if (pair.gold == pair.predicted) ++agree;
  return static_cast<double>(agree) / static_cast<double>(pairs.size());
}

double budget(long total_tasks, double price_per_task) {
  if (price_per_task < 0) throw Error("budget: negative price per task");
  return total_tasks * price_per_task;
}

long SentimentTable::candidate_total(Candidate c) const {
  long total = 0;
  for (long v : counts[static_cast<size_t>(c)]) total += v;
  return total;
}

long SentimentTable::sentiment_total(Sentiment s) const {
  long total = 0;
  for (const auto& row : counts) total += row[static_cast<size_t>(s)];
  return total;
}

long SentimentTable::grand_total() const {
  long total = 0;
  for (Candidate c : kAllCandidates) total += candidate_total(c);
  return total;
}

SentimentTable sentiment_distribution(
    std::span<const std::pair<Candidate, Sentiment>> labels) {
  SentimentTable table;
  for (const auto& [cand, sent] : labels)
    ++table.counts[static_cast<size_t>(cand)][static_cast<size_t>(sent)];
  return table;
}

std::string SentimentTable::to_csv() const {
  std::ostringstream out;
  out << "sentiment";
  for (Candidate c : kAllCandidates) out << "," << to_string(c);
  out << ",total\n";
  for (Sentiment s : kAllSentiments) {
    out << to_string(s);
    for (Candidate c : kAllCandidates)
      out << "," << counts[static_cast<size_t>(c)][static_cast<size_t>(s)];
    out << "," << sentiment_total(s) << "\n";
  }
  out << "total";
  for (Candidate c : kAllCandidates) out << "," << candidate_total(c);
  out << "," << grand_total() << "\n";
  return out.str();
}

std::string SentimentTable::to_text(const std::string& title) const {
  std::ostringstream out;
  out << title << "\n";
  char buf[160];
  snprintf(buf, sizeof buf, "%-10s %8s %8s %8s %8s %8s\n", "", "Clinton",
           "Cruz", "Sanders", "Trump", "total");
  out << buf;
  for (Sentiment s : kAllSentiments) {
    snprintf(buf, sizeof buf, "%-10s %8ld %8ld %8ld %8ld %8ld\n", to_string(s),
             counts[0][static_cast<size_t>(s)], counts[1][static_cast<size_t>(s)],
             counts[2][static_cast<size_t>(s)], counts[3][static_cast<size_t>(s)],
             sentiment_total(s));
    out << buf;
  }
  snprintf(buf, sizeof buf, "%-10s %8ld %8ld %8ld %8ld %8ld\n", "total",
           candidate_total(Candidate::Clinton), candidate_total(Candidate::Cruz),
           candidate_total(Candidate::Sanders), candidate_total(Candidate::Trump),
           grand_total());
  out << buf;
  return out.str();
}

DurationStats duration_stats(std::span<const double> durations_s, double lo,
                             double hi, int buckets) {
  if (buckets < 1) throw Error("duration_stats: need at least one bucket");
  if (!(hi > lo)) throw Error("duration_stats: bucket range is empty");
  DurationStats stats;
  stats.bucket_lo = lo;
  stats.bucket_hi = hi;
  stats.histogram.assign(buckets, 0);
  if (durations_s.empty()) return stats;

  double total = 0.0;
  stats.min = durations_s.front();
  stats.max = durations_s.front();
  const double width = (hi - lo) / buckets;
  for (double d : durations_s) {
    if (d < 0) throw Error("duration_stats: negative duration");
    total += d;
    stats.min = std::min(stats.min, d);
    stats.max = std::max(stats.max, d);
    int b = static_cast<int>((d - lo) / width);
    b = std::clamp(b, 0, buckets - 1);  // out-of-range values land in the edges
    ++stats.histogram[b];
  }
  stats.count = durations_s.size();
  stats.mean = total / static_cast<double>(stats.count);
  return stats;
}

std::string DurationStats::to_csv() const {
  std::ostringstream out;
  out << "bucket_lo,bucket_hi,count\n";
  const double width =
      (bucket_hi - bucket_lo) / static_cast<double>(histogram.size());
  char buf[96];
  for (size_t i = 0; i < histogram.size(); ++i) {
    snprintf(buf, sizeof buf, "%g,%g,%ld\n", bucket_lo + width * i,
             bucket_lo + width * (i + 1), histogram[i]);
    out << buf;
  }
  return out.str();
}

std::string DurationStats::summary() const {
  if (empty()) return "durations: none recorded\n";
  std::ostringstream out;
  char buf[160];
  snprintf(buf, sizeof buf,
           "durations: n=%zu mean=%.3fs min=%.3fs max=%.3fs\n", count, mean,
           min, max);
  out << buf;
  return out.str();
}

}  // namespace crowdalloc
