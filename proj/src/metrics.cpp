#include "survey/metrics.hpp"

namespace survey::metrics {

ConfusionMatrix::ConfusionMatrix(Eigen::MatrixXd counts) : counts_(std::move(counts)) {
  if (counts_.rows() != counts_.cols() || counts_.rows() < 1) {
    throw ValidationError("confusion matrix must be square and non-empty");
  }
  if (counts_.minCoeff() < 0.0) {
    throw ValidationError("confusion matrix counts must be non-negative");
  }
  if (counts_.sum() <= 0.0) {
    throw ValidationError("confusion matrix total must be positive");
  }
}

ConfusionMatrix confusion(std::span<const int> predicted,
                          std::span<const int> observed, int k) {
  if (predicted.size() != observed.size()) {
    throw ValidationError("confusion: predicted and observed lengths differ (" +
                          std::to_string(predicted.size()) + " vs " +
                          std::to_string(observed.size()) + ")");
  }
  if (predicted.empty()) throw ValidationError("confusion: empty input");
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int p = predicted[i];
    const int o = observed[i];
    if (p < 0 || p >= k || o < 0 || o >= k) {
      throw ValidationError("confusion: category index outside [0, " +
                            std::to_string(k) + ")");
    }
    counts(p, o) += 1.0;
  }
  return ConfusionMatrix(std::move(counts));
}

double accuracy(const ConfusionMatrix& m) {
  return m.counts().trace() / m.total();
}

MacroPrecision macro_precision(const ConfusionMatrix& m) {
  MacroPrecision out;
  double sum = 0.0;
  int used = 0;
  for (int i = 0; i < m.k(); ++i) {
    const double row = m.counts().row(i).sum();
    if (row <= 0.0) {
      out.skipped_classes.push_back(i);
      continue;
    }
    sum += m.counts()(i, i) / row;
    ++used;
  }
  if (used == 0) throw ValidationError("macro_precision: all rows empty");
  out.value = sum / used;
  return out;
}

double baseline_accuracy(const Eigen::VectorXd& shares, Baseline kind) {
  if (shares.size() < 1 || shares.minCoeff() < 0.0) {
    throw ValidationError("baseline_accuracy: invalid shares");
  }
  switch (kind) {
    case Baseline::kMajority:
      return shares.maxCoeff();
    case Baseline::kPriorMatched:
      return shares.squaredNorm();
  }
  throw ValidationError("baseline_accuracy: unknown kind");
}

}  // namespace survey::metrics
