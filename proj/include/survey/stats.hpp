#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "survey/core.hpp"
#include "survey/noise.hpp"

namespace survey::stats {

// Histogram of responses over the 1..10 scale.
struct CountVector {
  std::array<std::int64_t, Score::kLevels> counts{};

  std::int64_t total() const;
  void validate() const;  // non-negative cells, positive total
};

struct SpreadSummary {
  double mean = 0.0;
  double two_sigma = 0.0;  // two sample standard deviations (n-1 denominator)
};

SpreadSummary describe_spread(std::span<const double> values);

// Score x self-assigned-category contingency counts. Column order is the
// order of first appearance in the input.
struct Crosstab {
  std::vector<std::string> labels;
  Eigen::MatrixXi counts;                   // 10 rows (scores) x labels
  std::vector<std::string> modal_by_score;  // empty when a score is unseen
};

Crosstab crosstab(std::span<const int> scores, std::span<const std::string> labels);

enum class Chi2Variant {
  kFull,        // all ten cells against a uniform expectation
  kOmitBelow3,  // scores 1-2 dropped, expectation renormalized
  kLogCounts,   // log(1+count) rescaled to preserve the total (interpretation)
};

const char* to_string(Chi2Variant variant);

struct Chi2Result {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  Chi2Variant variant = Chi2Variant::kFull;
  std::vector<std::string> warnings;
};

// Pearson uniformity test; p-value from the regularized upper incomplete
// gamma Q(dof/2, statistic/2).
Chi2Result chi2_uniformity(const CountVector& counts, Chi2Variant variant);

struct VariantComparison {
  Chi2Result uncalibrated;
  Chi2Result calibrated;
  double p_ratio = 1.0;  // calibrated p / uncalibrated p
  bool calibrated_more_uniform = false;
};

struct UniformityComparison {
  std::array<VariantComparison, 3> variants;  // full, omit-below-3, log-counts
};

UniformityComparison compare_uniformity(const CountVector& uncalibrated,
                                        const CountVector& calibrated);

// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0; series for
// small x, Lentz continued fraction otherwise. Relative error <= 1e-8.
double gamma_q(double a, double x);

// Fixture generators shaped like the employee-survey results: respondents
// avoid the low end of an uncalibrated scale, while attaching a short text
// anchor to each number broadens the response range.
CountVector demo_uncalibrated_counts();
CountVector demo_calibrated_counts();

// Response-level fixture: scores with self-assigned categories ("great"
// for 8-10, "okay" for 4-7, "bad" for 1-3, with sub-modal jitter at the
// boundaries).
Dataset demo_labeled_responses(int n, noise::Rng& rng);

}  // namespace survey::stats
