#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survey/error.hpp"

namespace survey {

// An ordinal survey rating on the fixed 1..10 scale.
class Score {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 10;
  static constexpr int kLevels = kMax - kMin + 1;

  explicit Score(int value);

  int value() const { return value_; }
  friend bool operator==(Score a, Score b) { return a.value_ == b.value_; }
  friend auto operator<=>(Score a, Score b) { return a.value_ <=> b.value_; }

 private:
  int value_;
};

// A contiguous partition of the 1..10 scale into k labeled bins,
// represented by the inclusive upper boundary of each bin.
class BinningScheme {
 public:
  BinningScheme(std::vector<int> upper_bounds, std::vector<std::string> labels);

  int bin_count() const { return static_cast<int>(upper_.size()); }
  int bin_of(int score) const;
  int bin_size(int index) const;
  // Inclusive [low, high] score range of a bin.
  std::pair<int, int> bin_range(int index) const;
  const std::string& label(int index) const { return labels_[index]; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<int>& upper_bounds() const { return upper_; }

  // Text form "1-6,7-8,9-10"; parseable back by io::parse_scheme.
  std::string spec_string() const;

  friend bool operator==(const BinningScheme& a, const BinningScheme& b) {
    return a.upper_ == b.upper_ && a.labels_ == b.labels_;
  }

 private:
  std::vector<int> upper_;
  std::vector<std::string> labels_;
};

// The standard NPS categorization: Detractor 1-6, Passive 7-8, Promoter 9-10.
const BinningScheme& nps_scheme();

// Default labels for a k-bin scheme: the NPS trio for k=3, Low/High for k=2,
// Bin-1..Bin-k otherwise.
std::vector<std::string> default_labels(int k);

struct Category {
  int index;
  std::string label;
  friend bool operator==(const Category& a, const Category& b) {
    return a.index == b.index && a.label == b.label;
  }
};

Category categorize(Score score, const BinningScheme& scheme);

// One respondent row. biased_score is the score actually marked in the
// survey; unbiased_score is the respondent's true opinion when known.
struct SurveyRecord {
  std::string id;
  std::optional<Score> unbiased_score;
  Score biased_score;
  std::optional<Eigen::VectorXd> features;
  std::optional<std::string> self_category;
};

struct Dataset {
  std::vector<SurveyRecord> records;
  std::vector<std::string> feature_names;

  // Throws ValidationError on empty data or ragged feature vectors.
  void validate() const;

  int size() const { return static_cast<int>(records.size()); }
  bool has_features() const;
  // Dense feature matrix (rows = records). Throws if any record lacks features.
  Eigen::MatrixXd feature_matrix() const;
};

// Net Promoter Score on the -100..100 scale. shares[i] is the proportion of
// bin i (low to high); the top bin counts as promoters, the bottom bin as
// detractors. Shares must sum to 1 within 1e-9.
double nps(const Eigen::VectorXd& shares);

// Per-bin proportions of a category-index sequence; every bin present.
Eigen::VectorXd class_shares(std::span<const int> category_indices, int k);

}  // namespace survey
