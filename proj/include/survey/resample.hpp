#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "survey/core.hpp"
#include "survey/noise.hpp"

namespace survey::resample {

// Balanced-undersampling protocol: draw per_class_size records from every
// category (with replacement by default), evaluate the metric, repeat.
struct ResamplePlan {
  int iterations = 1000;
  // Records per class per iteration; unset means the minority class size.
  std::optional<int> per_class_size;
  bool with_replacement = true;
  noise::RngSpec rng;
};

struct EnsembleEstimate {
  double mean = 0.0;
  double std = 0.0;  // ensemble standard deviation of the metric values
  int iterations = 0;
};

// Record indices grouped by category; labels used only in error messages.
struct CategoryGroups {
  std::vector<std::vector<int>> indices;
  std::vector<std::string> labels;
};

// Groups a dataset's record indices by the unbiased category.
// Every record must carry an unbiased score.
CategoryGroups group_by_unbiased_category(const Dataset& dataset,
                                          const BinningScheme& scheme);

// Groups by the category of the biased score (the only grouping available
// when the true opinion is unknown).
CategoryGroups group_by_biased_category(const Dataset& dataset,
                                        const BinningScheme& scheme);

// Vector-valued ensemble: metric maps one balanced sample (record indices,
// ordered class by class) to a vector of statistics. Returns per-component
// mean and ensemble std. Iteration i draws from an independent substream,
// so results are independent of evaluation order.
std::pair<Eigen::VectorXd, Eigen::VectorXd> balanced_ensemble_vec(
    const CategoryGroups& groups, const ResamplePlan& plan,
    const std::function<Eigen::VectorXd(std::span<const int>)>& metric);

// Scalar convenience wrapper.
EnsembleEstimate balanced_ensemble(
    const CategoryGroups& groups, const ResamplePlan& plan,
    const std::function<double(std::span<const int>)>& metric);

}  // namespace survey::resample
