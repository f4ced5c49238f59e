#include "survey/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace survey {

Score::Score(int value) : value_(value) {
  if (value < kMin || value > kMax) {
    throw ValidationError("score " + std::to_string(value) + " outside [" +
                          std::to_string(kMin) + ", " + std::to_string(kMax) + "]");
  }
}

BinningScheme::BinningScheme(std::vector<int> upper_bounds,
                             std::vector<std::string> labels)
    : upper_(std::move(upper_bounds)), labels_(std::move(labels)) {
  if (upper_.size() < 2) {
    throw ValidationError("binning scheme needs at least 2 bins");
  }
  if (labels_.size() != upper_.size()) {
    throw ValidationError("scheme has " + std::to_string(upper_.size()) +
                          " bins but " + std::to_string(labels_.size()) + " labels");
  }
  int prev = Score::kMin - 1;
  for (int hi : upper_) {
    if (hi <= prev) {
      throw ValidationError("bin boundaries must be strictly increasing (got " +
                            std::to_string(hi) + " after " + std::to_string(prev) + ")");
    }
    prev = hi;
  }
  if (upper_.back() != Score::kMax) {
    throw ValidationError("bins must cover the scale up to " +
                          std::to_string(Score::kMax));
  }
}

int BinningScheme::bin_of(int score) const {
  auto it = std::lower_bound(upper_.begin(), upper_.end(), score);
  return static_cast<int>(it - upper_.begin());
}

int BinningScheme::bin_size(int index) const {
  auto [lo, hi] = bin_range(index);
  return hi - lo + 1;
}

std::pair<int, int> BinningScheme::bin_range(int index) const {
  int lo = index == 0 ? Score::kMin : upper_[index - 1] + 1;
  return {lo, upper_[index]};
}

std::string BinningScheme::spec_string() const {
  std::ostringstream out;
  for (int i = 0; i < bin_count(); ++i) {
    auto [lo, hi] = bin_range(i);
    if (i > 0) out << ',';
    out << lo << '-' << hi;
  }
  return out.str();
}

const BinningScheme& nps_scheme() {
  static const BinningScheme scheme({6, 8, 10}, {"Detractor", "Passive", "Promoter"});
  return scheme;
}

std::vector<std::string> default_labels(int k) {
  if (k == 3) return {"Detractor", "Passive", "Promoter"};
  if (k == 2) return {"Low", "High"};
  std::vector<std::string> labels;
  labels.reserve(k);
  for (int i = 1; i <= k; ++i) labels.push_back("Bin-" + std::to_string(i));
  return labels;
}

Category categorize(Score score, const BinningScheme& scheme) {
  int index = scheme.bin_of(score.value());
  return Category{index, scheme.label(index)};
}

void Dataset::validate() const {
  if (records.empty()) throw ValidationError("dataset is empty");
  std::optional<Eigen::Index> width;
  for (const auto& r : records) {
    if (!r.features) continue;
    if (width && r.features->size() != *width) {
      throw ValidationError("feature vectors have inconsistent lengths");
    }
    width = r.features->size();
  }
  if (width && !feature_names.empty() &&
      static_cast<Eigen::Index>(feature_names.size()) != *width) {
    throw ValidationError("feature_names length does not match feature vectors");
  }
}

bool Dataset::has_features() const {
  return !records.empty() && records.front().features.has_value();
}

Eigen::MatrixXd Dataset::feature_matrix() const {
  validate();
  if (!has_features()) throw ValidationError("dataset has no features");
  const Eigen::Index p = records.front().features->size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(records.size()), p);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto& f = records[static_cast<std::size_t>(i)].features;
    if (!f) throw ValidationError("record " + std::to_string(i) + " lacks features");
    m.row(i) = *f;
  }
  return m;
}

double nps(const Eigen::VectorXd& shares) {
  if (shares.size() < 2) {
    throw ValidationError("nps needs at least 2 category shares");
  }
  if (shares.minCoeff() < 0.0) {
    throw ValidationError("category shares must be non-negative");
  }
  if (std::abs(shares.sum() - 1.0) > 1e-9) {
    throw ValidationError("category shares must sum to 1 (got " +
                          std::to_string(shares.sum()) + ")");
  }
  return 100.0 * (shares(shares.size() - 1) - shares(0));
}

Eigen::VectorXd class_shares(std::span<const int> category_indices, int k) {
  if (category_indices.empty()) {
    throw ValidationError("class_shares needs a non-empty category sequence");
  }
  if (k < 2) throw ValidationError("class_shares needs k >= 2");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
  for (int c : category_indices) {
    if (c < 0 || c >= k) {
      throw ValidationError("category index " + std::to_string(c) +
                            " outside [0, " + std::to_string(k) + ")");
    }
    counts(c) += 1.0;
  }
  return counts / static_cast<double>(category_indices.size());
}

}  // namespace survey
