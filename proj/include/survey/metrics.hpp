#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "survey/core.hpp"

namespace survey::metrics {

// k x k category-level counts; rows = predicted (unbiased) category,
// columns = observed (biased) label. Counts may be fractional: exact
// enumeration feeds rationally-weighted cells through the same type.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(Eigen::MatrixXd counts);

  const Eigen::MatrixXd& counts() const { return counts_; }
  int k() const { return static_cast<int>(counts_.rows()); }
  double total() const { return counts_.sum(); }

 private:
  Eigen::MatrixXd counts_;
};

ConfusionMatrix confusion(std::span<const int> predicted,
                          std::span<const int> observed, int k);

// trace / total.
double accuracy(const ConfusionMatrix& m);

struct MacroPrecision {
  double value = 0.0;
  std::vector<int> skipped_classes;  // rows with no mass, excluded from the mean
};

// Unweighted mean over classes of counts[i][i] / row_sum(i).
MacroPrecision macro_precision(const ConfusionMatrix& m);

enum class Baseline { kMajority, kPriorMatched };

// Accuracy of a label-blind guesser: majority = max share,
// prior-matched = sum of squared shares.
double baseline_accuracy(const Eigen::VectorXd& shares, Baseline kind);

}  // namespace survey::metrics
