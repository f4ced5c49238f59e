#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "survey/core.hpp"
#include "survey/metrics.hpp"
#include "survey/noise.hpp"
#include "survey/resample.hpp"

namespace survey::bounds {

enum class Method { kExact, kMonteCarlo };

// Ensemble standard deviations, present in Monte Carlo mode.
struct BoundStd {
  double accuracy_upper = 0.0;
  double precision_upper = 0.0;
  double lower_majority = 0.0;
  double lower_prior_matched = 0.0;
  Eigen::VectorXd class_shares;
  double nps_unbiased = 0.0;
  double nps_biased = 0.0;
  double nps_balanced = 0.0;
};

// All per-v quantities. Upper/lower bounds and class shares follow the
// balanced (equal weight per unbiased class) protocol; nps_unbiased and
// nps_biased are taken over the full uniform population; nps_balanced is
// the biased NPS of the balanced set (its unbiased counterpart is 0, so
// this value is also the balanced NPS drift).
struct BoundPoint {
  int v = 0;
  double accuracy_upper = 0.0;
  double precision_upper = 0.0;
  double lower_majority = 0.0;
  double lower_prior_matched = 0.0;
  Eigen::VectorXd class_shares;        // balanced biased shares, sum 1
  Eigen::VectorXd class_shares_total;  // balanced bin counts / population size
  double nps_unbiased = 0.0;
  double nps_biased = 0.0;
  double nps_balanced = 0.0;
  std::optional<BoundStd> std;
};

struct BoundCurve {
  BinningScheme scheme;
  Method method = Method::kExact;
  std::vector<BoundPoint> points;  // v = 0 .. v_max in order
  int n = 0;                       // Monte Carlo sample size (0 for exact)
};

// Integer-weighted enumeration over (unbiased score, noise outcome) pairs:
// counts / denom is the exact joint category distribution.
struct ExactWeights {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  std::int64_t denom = 0;
};

// Each unbiased class carries total weight 1/k (the balanced protocol).
ExactWeights exact_balanced_weights(const BinningScheme& scheme, int v);
// Each score carries weight 1/10 (the raw uniform population).
ExactWeights exact_population_weights(const BinningScheme& scheme, int v);

BoundPoint exact_bounds(const BinningScheme& scheme, int v);

BoundPoint mc_bounds(const BinningScheme& scheme, int v, int n,
                     const resample::ResamplePlan& plan);

BoundCurve bound_curve(const BinningScheme& scheme, int v_max, Method method,
                       int n = 10000, const resample::ResamplePlan& plan = {});

}  // namespace survey::bounds
