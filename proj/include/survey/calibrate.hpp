#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "survey/bounds.hpp"
#include "survey/core.hpp"
#include "survey/noise.hpp"
#include "survey/resample.hpp"

namespace survey::calibrate {

struct RegressionFit {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double rmse = 0.0;  // root of the mean squared residual on the training rows
  int n_rows = 0;
  int n_features = 0;
  int rank = 0;  // of [1 | X]
  std::vector<std::string> warnings;
};

// Least squares with intercept via complete orthogonal decomposition;
// rank-deficient systems get the minimum-norm solution plus a warning.
RegressionFit ols_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& targets);

// Monotone map from noise half-width v to regression RMSE, invertible for
// variability estimation. rmse(0) must be 0 and the grid strictly
// increasing; the unclipped-noise envelope sqrt(v(v+1)/3) caps every value.
class RmseCurve {
 public:
  explicit RmseCurve(std::vector<double> rmse_by_v);

  int v_max() const { return static_cast<int>(rmse_.size()) - 1; }
  double rmse_at(int v) const { return rmse_[static_cast<std::size_t>(v)]; }
  const std::vector<double>& values() const { return rmse_; }

 private:
  std::vector<double> rmse_;
};

// For each v in 0..v_max: fresh uniform scores, clipped noise, biased
// regressed on unbiased; the per-v RMSEs form the curve. Draw streams are
// derived from the generator's spec, which is left unadvanced.
RmseCurve synth_rmse_curve(int v_max, int n, noise::Rng& rng);

struct VariabilityEstimate {
  double v_hat = 0.0;
  std::vector<std::string> warnings;
};

// Piecewise-linear inversion of the curve; values above rmse(v_max) clamp
// to v_max with a warning.
VariabilityEstimate estimate_variability(double real_rmse, const RmseCurve& curve);

struct CeilingReport {
  double accuracy_ceiling = 1.0;
  std::optional<double> relative_score;
  std::vector<std::string> warnings;
};

// Interpolates the exact accuracy upper bound of the scheme at fractional
// v_hat; relative_score = actual / ceiling when an actual score is given.
CeilingReport ceiling_and_relative(double v_hat, const BinningScheme& scheme,
                                   std::optional<double> actual = std::nullopt);

struct EstimateReport {
  resample::EnsembleEstimate rmse;  // balanced-ensemble RMSE of the fits
  double v_hat = 0.0;
  CeilingReport ceiling;
  RegressionFit full_fit;  // single fit on the whole dataset, for reference
  std::vector<std::string> warnings;
};

// End-to-end estimate for a real dataset: balanced-ensemble OLS RMSE
// (classes keyed on the categorized biased score), curve inversion, and
// ceiling lookup.
EstimateReport estimate_from_dataset(const Dataset& dataset,
                                     const BinningScheme& scheme,
                                     const RmseCurve& curve,
                                     const resample::ResamplePlan& plan,
                                     std::optional<double> actual = std::nullopt);

}  // namespace survey::calibrate
