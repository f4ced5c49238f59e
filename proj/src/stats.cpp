#include "survey/stats.hpp"

#include <algorithm>
#include <cmath>

namespace survey::stats {

namespace {

// Lower regularized incomplete gamma P(a,x) by series expansion.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma Q(a,x) by modified Lentz continued
// fraction.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double mult = d * c;
    h *= mult;
    if (std::abs(mult - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

std::vector<double> retained_cells(const CountVector& counts, Chi2Variant variant) {
  std::vector<double> cells;
  switch (variant) {
    case Chi2Variant::kFull:
      for (auto c : counts.counts) cells.push_back(static_cast<double>(c));
      break;
    case Chi2Variant::kOmitBelow3:
      for (int s = 3; s <= Score::kMax; ++s) {
        cells.push_back(static_cast<double>(counts.counts[static_cast<std::size_t>(s - 1)]));
      }
      break;
    case Chi2Variant::kLogCounts: {
      double raw_total = 0.0;
      double log_total = 0.0;
      for (auto c : counts.counts) {
        raw_total += static_cast<double>(c);
        log_total += std::log1p(static_cast<double>(c));
      }
      for (auto c : counts.counts) {
        cells.push_back(std::log1p(static_cast<double>(c)) * raw_total / log_total);
      }
      break;
    }
  }
  return cells;
}

}  // namespace

std::int64_t CountVector::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

void CountVector::validate() const {
  for (auto c : counts) {
    if (c < 0) throw ValidationError("counts must be non-negative");
  }
  if (total() <= 0) throw ValidationError("counts are empty");
}

SpreadSummary describe_spread(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw ValidationError("describe_spread needs at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return SpreadSummary{mean, 2.0 * sd};
}

Crosstab crosstab(std::span<const int> scores, std::span<const std::string> labels) {
  if (scores.size() != labels.size()) {
    throw ValidationError("crosstab: scores and labels lengths differ (" +
                          std::to_string(scores.size()) + " vs " +
                          std::to_string(labels.size()) + ")");
  }
  if (scores.empty()) throw ValidationError("crosstab: empty input");

  Crosstab out;
  for (const auto& label : labels) {
    if (std::find(out.labels.begin(), out.labels.end(), label) == out.labels.end()) {
      out.labels.push_back(label);
    }
  }
  out.counts = Eigen::MatrixXi::Zero(Score::kLevels, static_cast<int>(out.labels.size()));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int row = Score(scores[i]).value() - Score::kMin;
    const auto col = std::find(out.labels.begin(), out.labels.end(), labels[i]) -
                     out.labels.begin();
    out.counts(row, static_cast<int>(col)) += 1;
  }
  out.modal_by_score.resize(Score::kLevels);
  for (int s = 0; s < Score::kLevels; ++s) {
    int best = -1;
    for (int c = 0; c < out.counts.cols(); ++c) {
      if (out.counts(s, c) > 0 && (best < 0 || out.counts(s, c) > out.counts(s, best))) {
        best = c;
      }
    }
    if (best >= 0) out.modal_by_score[static_cast<std::size_t>(s)] = out.labels[static_cast<std::size_t>(best)];
  }
  return out;
}

const char* to_string(Chi2Variant variant) {
  switch (variant) {
    case Chi2Variant::kFull: return "full";
    case Chi2Variant::kOmitBelow3: return "omit-below-3";
    case Chi2Variant::kLogCounts: return "log-counts";
  }
  return "unknown";
}

double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw ValidationError("gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

Chi2Result chi2_uniformity(const CountVector& counts, Chi2Variant variant) {
  counts.validate();
  const std::vector<double> cells = retained_cells(counts, variant);
  double total = 0.0;
  for (double c : cells) total += c;
  if (total <= 0.0) {
    throw ValidationError("no observations left in the retained cells");
  }

  Chi2Result result;
  result.variant = variant;
  const double expected = total / static_cast<double>(cells.size());
  if (expected < 1.0) {
    result.warnings.push_back("expected count per cell below 1; the chi-square "
                              "approximation is unreliable");
  } else if (expected < 5.0) {
    result.warnings.push_back("expected count per cell below 5");
  }
  double stat = 0.0;
  for (double c : cells) stat += (c - expected) * (c - expected) / expected;
  result.statistic = stat;
  result.dof = static_cast<int>(cells.size()) - 1;
  result.p_value = gamma_q(result.dof / 2.0, stat / 2.0);
  return result;
}

UniformityComparison compare_uniformity(const CountVector& uncalibrated,
                                        const CountVector& calibrated) {
  UniformityComparison out;
  const std::array<Chi2Variant, 3> variants = {
      Chi2Variant::kFull, Chi2Variant::kOmitBelow3, Chi2Variant::kLogCounts};
  for (std::size_t i = 0; i < variants.size(); ++i) {
    VariantComparison cmp;
    cmp.uncalibrated = chi2_uniformity(uncalibrated, variants[i]);
    cmp.calibrated = chi2_uniformity(calibrated, variants[i]);
    cmp.p_ratio = cmp.calibrated.p_value / cmp.uncalibrated.p_value;
    cmp.calibrated_more_uniform = cmp.calibrated.p_value > cmp.uncalibrated.p_value;
    out.variants[i] = std::move(cmp);
  }
  return out;
}

CountVector demo_uncalibrated_counts() {
  CountVector c;
  c.counts = {0, 0, 2, 3, 8, 25, 35, 50, 45, 32};
  return c;
}

CountVector demo_calibrated_counts() {
  CountVector c;
  c.counts = {8, 10, 14, 18, 22, 26, 28, 28, 24, 22};
  return c;
}

Dataset demo_labeled_responses(int n, noise::Rng& rng) {
  if (n < 1) throw ValidationError("fixture needs n >= 1");
  const auto base_label = [](int score) {
    if (score >= 8) return "great";
    if (score >= 4) return "okay";
    return "bad";
  };
  Dataset out;
  out.records.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int score = rng.uniform_int(Score::kMin, Score::kMax);
    std::string label = base_label(score);
    // boundary respondents occasionally pick the neighboring category,
    // never often enough to move the mode
    const bool boundary = score == 4 || score == 7 || score == 8 || score == 3;
    if (boundary && rng.uniform_int(0, 3) == 0) {
      label = base_label(score + (score == 4 || score == 8 ? -1 : 1));
    }
    out.records.push_back(SurveyRecord{
        .id = std::to_string(i + 1),
        .unbiased_score = std::nullopt,
        .biased_score = Score(score),
        .features = std::nullopt,
        .self_category = label,
    });
  }
  return out;
}

}  // namespace survey::stats
