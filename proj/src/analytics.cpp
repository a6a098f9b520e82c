#include "crowdalloc/analytics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "crowdalloc/error.hpp"

namespace crowdalloc {

Scheme Scheme::fixed(int k) {
  if (k < 1 || k % 2 == 0)
    throw Error("scheme: fixed jury size must be odd and >= 1, got " +
                std::to_string(k));
  Scheme s;
  s.kind = Kind::Fixed;
  s.fixed_k = k;
  return s;
}

Scheme Scheme::dynamic(int initial, int extra) {
  if (initial < 2)
    throw Error("scheme: dynamic initial count must be >= 2, got " +
                std::to_string(initial));
  if (extra < 1)
    throw Error("scheme: dynamic extra count must be >= 1, got " +
                std::to_string(extra));
  Scheme s;
  s.kind = Kind::Dynamic;
  s.initial = initial;
  s.extra = extra;
  return s;
}

Scheme Scheme::from_name(std::string_view name) {
  std::string text(name);
  int n = 0, m = 0;
  if (sscanf(text.c_str(), "trad%d", &n) == 1 &&
      text == "trad" + std::to_string(n))
    return fixed(n);
  if (sscanf(text.c_str(), "dyn%d+%d", &n, &m) == 2 &&
      text == "dyn" + std::to_string(n) + "+" + std::to_string(m))
    return dynamic(n, m);
  throw Error("scheme: unknown scheme name '" + text +
              "' (expected tradK or dynN+M)");
}

std::string Scheme::name() const {
  if (kind == Kind::Fixed) return "trad" + std::to_string(fixed_k);
  return "dyn" + std::to_string(initial) + "+" + std::to_string(extra);
}

int Scheme::max_workers() const {
  return kind == Kind::Fixed ? fixed_k : initial + extra;
}

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error("probability out of [0, 1]: " + std::to_string(p));
}

double binomial_coeff(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// P(Binomial(n, p) = k)
double binom_pmf(int n, int k, double p) {
  return binomial_coeff(n, k) * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

// 1 / 0.5 / 0 credit for `correct` votes out of `total`.
double majority_credit(int correct, int total) {
  if (2 * correct > total) return 1.0;
  if (2 * correct == total) return 0.5;
  return 0.0;
}

}  // namespace

double pm_fixed(int k, double p) {
  if (k < 1 || k % 2 == 0)
    throw Error("pm_fixed: jury size must be odd and >= 1, got " +
                std::to_string(k));
  check_probability(p);
  double total = 0.0;
  for (int i = (k + 1) / 2; i <= k; ++i) total += binom_pmf(k, i, p);
  return total;
}

double pm_dynamic(const Scheme& s, double p) {
  if (s.kind != Scheme::Kind::Dynamic)
    throw Error("pm_dynamic: not a dynamic scheme");
  check_probability(p);
  const int n = s.initial, m = s.extra;
  // Unanimous first round ends it: all correct wins, all wrong (the single
  // shared wrong label) loses.  Any split buys m more ballots and the
  // majority over n+m decides, even splits by a fair coin.
  double total = std::pow(p, n);
  for (int c = 1; c < n; ++c) {
    double follow_up = 0.0;
    for (int c2 = 0; c2 <= m; ++c2)
      follow_up += binom_pmf(m, c2, p) * majority_credit(c + c2, n + m);
    total += binom_pmf(n, c, p) * follow_up;
  }
  return total;
}

double pm(const Scheme& s, double p) {
  return s.kind == Scheme::Kind::Fixed ? pm_fixed(s.fixed_k, p)
                                       : pm_dynamic(s, p);
}

namespace {

struct EnumerationAccumulator {
  double pm = 0.0;
  double total_weight = 0.0;
};

EnumerationAccumulator enumerate_impl(const Scheme& s, double p) {
  const int total = s.max_workers();
  if (total > 20)
    throw Error("enumerate_scheme: " + std::to_string(total) +
                " workers exceed the 2^20 enumeration bound");
  check_probability(p);
  const int first = s.kind == Scheme::Kind::Fixed ? s.fixed_k : s.initial;

  EnumerationAccumulator acc;
  for (uint32_t mask = 0; mask < (uint32_t{1} << total); ++mask) {
    int correct = __builtin_popcount(mask);
    double weight = std::pow(p, correct) * std::pow(1.0 - p, total - correct);
    int first_correct = __builtin_popcount(mask & ((uint32_t{1} << first) - 1));
    double credit;
    if (s.kind == Scheme::Kind::Fixed) {
      credit = majority_credit(first_correct, first);
    } else if (first_correct == first || first_correct == 0) {
      // Unanimous: stops after the first round; the unused extension
      // outcomes still carry the prefix's full weight.
      credit = first_correct == first ? 1.0 : 0.0;
    } else {
      credit = majority_credit(correct, total);
    }
    acc.pm += weight * credit;
    acc.total_weight += weight;
  }
  return acc;
}

}  // namespace

double enumerate_scheme(const Scheme& s, double p) {
  return enumerate_impl(s, p).pm;
}

double enumerate_total_weight(const Scheme& s, double p) {
  return enumerate_impl(s, p).total_weight;
}

double unanimity_probability(int n, double p) {
  check_probability(p);
  return std::pow(p, n) + std::pow(1.0 - p, n);
}

double expected_tasks(const Scheme& s, std::optional<double> p,
                      std::optional<double> u, double n_items) {
  if (p && u) throw Error("expected_tasks: supply either p or u, not both");
  if (s.kind == Scheme::Kind::Fixed) return s.fixed_k * n_items;
  if (!p && !u) throw Error("expected_tasks: dynamic scheme needs p or u");
  double unanimity;
  if (u) {
    if (!(*u >= 0.0 && *u <= 1.0))
      throw Error("expected_tasks: unanimity rate out of [0, 1]");
    unanimity = *u;
  } else {
    check_probability(*p);
    unanimity = unanimity_probability(s.initial, *p);
  }
  return n_items * (s.initial + s.extra * (1.0 - unanimity));
}

std::vector<CurveRow> curve(std::span<const Scheme> schemes,
                            std::span<const double> p_grid) {
  for (double p : p_grid) check_probability(p);
  std::vector<CurveRow> rows;
  rows.reserve(schemes.size() * p_grid.size());
  for (const Scheme& s : schemes) {
    for (double p : p_grid) {
      CurveRow row;
      row.p = p;
      row.scheme = s.name();
      row.pm = pm(s, p);
      row.expected_tasks_per_item =
          expected_tasks(s, p, std::nullopt, 1.0);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string curve_csv(std::span<const CurveRow> rows) {
  std::ostringstream out;
  out << "p,scheme,P_M,expected_tasks_per_item\n";
  char buf[128];
  for (const CurveRow& row : rows) {
    snprintf(buf, sizeof buf, "%g,%s,%.12g,%.12g\n", row.p, row.scheme.c_str(),
             row.pm, row.expected_tasks_per_item);
    out << buf;
  }
  return out.str();
}

}  // namespace crowdalloc
