#include "survey/calibrate.hpp"

#include <cmath>

namespace survey::calibrate {

RegressionFit ols_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets) {
  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  if (p < 1) throw ValidationError("ols_fit needs at least one feature");
  if (targets.size() != n) {
    throw ValidationError("ols_fit: feature rows and target length differ");
  }
  if (n <= p) {
    throw ValidationError("ols_fit needs more rows than features (n=" +
                          std::to_string(n) + ", p=" + std::to_string(p) + ")");
  }
  if (!features.allFinite() || !targets.allFinite()) {
    throw ValidationError("ols_fit: non-finite input");
  }

  RegressionFit fit;
  fit.n_rows = static_cast<int>(n);
  fit.n_features = static_cast<int>(p);

  if ((targets.array() == targets(0)).all()) {
    fit.coefficients = Eigen::VectorXd::Zero(p);
    fit.intercept = targets(0);
    fit.rmse = 0.0;
    fit.rank = 1;
    fit.warnings.push_back("constant target; zero-slope fit");
    return fit;
  }

  Eigen::MatrixXd design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) = features;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);  // duplicate columns must register as rank loss
  cod.compute(design);
  const Eigen::VectorXd beta = cod.solve(targets);
  fit.rank = static_cast<int>(cod.rank());
  if (fit.rank < p + 1) {
    fit.warnings.push_back("rank-deficient design (rank " + std::to_string(fit.rank) +
                           " of " + std::to_string(p + 1) + "); minimum-norm solution");
  }
  fit.intercept = beta(0);
  fit.coefficients = beta.tail(p);
  const Eigen::VectorXd residuals = targets - design * beta;
  fit.rmse = std::sqrt(residuals.squaredNorm() / static_cast<double>(n));
  return fit;
}

RmseCurve::RmseCurve(std::vector<double> rmse_by_v) : rmse_(std::move(rmse_by_v)) {
  if (rmse_.size() < 2) throw ValidationError("rmse curve needs at least v=0 and v=1");
  if (rmse_[0] > 1e-9) {
    throw ValidationError("rmse(0) must be 0 (got " + std::to_string(rmse_[0]) +
                          "); biased scores at v=0 should equal unbiased scores");
  }
  rmse_[0] = 0.0;
  for (std::size_t v = 1; v < rmse_.size(); ++v) {
    if (rmse_[v] <= rmse_[v - 1]) {
      throw ValidationError("rmse curve not strictly increasing at v=" +
                            std::to_string(v) + "; increase the sample size");
    }
    const double vd = static_cast<double>(v);
    const double envelope = std::sqrt(vd * (vd + 1.0) / 3.0);
    if (rmse_[v] > envelope) {
      throw ValidationError("rmse(" + std::to_string(v) + ") exceeds the unclipped "
                            "uniform-noise envelope " + std::to_string(envelope));
    }
  }
}

RmseCurve synth_rmse_curve(int v_max, int n, noise::Rng& rng) {
  if (v_max < 1 || v_max > Score::kLevels - 1) {
    throw ValidationError("v_max must be in [1, " + std::to_string(Score::kLevels - 1) + "]");
  }
  if (n < 1000) {
    throw ValidationError("synth_rmse_curve needs n >= 1000 for a stable grid");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(v_max) + 1);
  for (int v = 0; v <= v_max; ++v) {
    noise::Rng synth_rng = rng.substream(2 * static_cast<std::uint64_t>(v));
    noise::Rng noise_rng = rng.substream(2 * static_cast<std::uint64_t>(v) + 1);
    Dataset data = noise::generate_synth(n, synth_rng);
    data = noise::apply_noise(data, noise::NoiseModel(v), noise_rng);
    Eigen::MatrixXd x(n, 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = data.records[static_cast<std::size_t>(i)].unbiased_score->value();
      y(i) = data.records[static_cast<std::size_t>(i)].biased_score.value();
    }
    values.push_back(ols_fit(x, y).rmse);
  }
  return RmseCurve(std::move(values));
}

VariabilityEstimate estimate_variability(double real_rmse, const RmseCurve& curve) {
  if (real_rmse < 0.0) throw ValidationError("real_rmse must be >= 0");
  VariabilityEstimate out;
  if (real_rmse <= curve.rmse_at(0)) {
    out.v_hat = 0.0;
    return out;
  }
  if (real_rmse > curve.rmse_at(curve.v_max())) {
    out.v_hat = curve.v_max();
    out.warnings.push_back("rmse " + std::to_string(real_rmse) + " above the curve "
                           "maximum " + std::to_string(curve.rmse_at(curve.v_max())) +
                           "; estimate clamped to v_max");
    return out;
  }
  for (int v = 1; v <= curve.v_max(); ++v) {
    if (real_rmse <= curve.rmse_at(v)) {
      const double lo = curve.rmse_at(v - 1);
      const double hi = curve.rmse_at(v);
      out.v_hat = (v - 1) + (real_rmse - lo) / (hi - lo);
      return out;
    }
  }
  out.v_hat = curve.v_max();  // unreachable; loop covers the range
  return out;
}

CeilingReport ceiling_and_relative(double v_hat, const BinningScheme& scheme,
                                   std::optional<double> actual) {
  if (v_hat < 0.0 || v_hat > Score::kLevels - 1) {
    throw ValidationError("v_hat " + std::to_string(v_hat) + " outside [0, " +
                          std::to_string(Score::kLevels - 1) + "]");
  }
  CeilingReport out;
  const int lo = static_cast<int>(std::floor(v_hat));
  const int hi = std::min(lo + 1, Score::kLevels - 1);
  const double a_lo = bounds::exact_bounds(scheme, lo).accuracy_upper;
  if (lo == hi) {
    out.accuracy_ceiling = a_lo;
  } else {
    const double a_hi = bounds::exact_bounds(scheme, hi).accuracy_upper;
    out.accuracy_ceiling = a_lo + (v_hat - lo) * (a_hi - a_lo);
  }
  if (actual) {
    out.relative_score = *actual / out.accuracy_ceiling;
    if (*out.relative_score > 1.0) {
      out.warnings.push_back("actual score exceeds the estimated ceiling; the "
                             "noise-model assumptions do not hold for this data");
    }
  }
  return out;
}

EstimateReport estimate_from_dataset(const Dataset& dataset,
                                     const BinningScheme& scheme,
                                     const RmseCurve& curve,
                                     const resample::ResamplePlan& plan,
                                     std::optional<double> actual) {
  dataset.validate();
  if (!dataset.has_features()) {
    throw ValidationError("estimate_from_dataset needs feature columns to regress on");
  }
  const Eigen::MatrixXd features = dataset.feature_matrix();
  Eigen::VectorXd targets(dataset.size());
  for (int i = 0; i < dataset.size(); ++i) {
    targets(i) = dataset.records[static_cast<std::size_t>(i)].biased_score.value();
  }

  EstimateReport report;
  report.full_fit = ols_fit(features, targets);

  const resample::CategoryGroups groups =
      resample::group_by_biased_category(dataset, scheme);
  report.rmse = resample::balanced_ensemble(
      groups, plan, [&](std::span<const int> sample) {
        Eigen::MatrixXd x(static_cast<Eigen::Index>(sample.size()), features.cols());
        Eigen::VectorXd y(static_cast<Eigen::Index>(sample.size()));
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
          x.row(r) = features.row(sample[static_cast<std::size_t>(r)]);
          y(r) = targets(sample[static_cast<std::size_t>(r)]);
        }
        return ols_fit(x, y).rmse;
      });

  auto estimate = estimate_variability(report.rmse.mean, curve);
  report.v_hat = estimate.v_hat;
  report.warnings = std::move(estimate.warnings);
  report.ceiling = ceiling_and_relative(report.v_hat, scheme, actual);
  return report;
}

}  // namespace survey::calibrate
