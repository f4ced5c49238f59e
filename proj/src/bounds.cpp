#include "survey/bounds.hpp"

#include <numeric>

namespace survey::bounds {

namespace {

using Int64Matrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

void check_v(int v) {
  if (v < 0 || v > Score::kLevels - 1) {
    throw ValidationError("intrinsic variability " + std::to_string(v) +
                          " outside [0, " + std::to_string(Score::kLevels - 1) + "]");
  }
}

std::int64_t bin_size_lcm(const BinningScheme& scheme) {
  std::int64_t l = 1;
  for (int i = 0; i < scheme.bin_count(); ++i) {
    l = std::lcm(l, static_cast<std::int64_t>(scheme.bin_size(i)));
  }
  return l;
}

ExactWeights enumerate(const BinningScheme& scheme, int v, bool balanced) {
  check_v(v);
  const int k = scheme.bin_count();
  const noise::NoiseModel model(v);
  const std::int64_t lcm = bin_size_lcm(scheme);
  ExactWeights out;
  out.counts = Int64Matrix::Zero(k, k);
  for (int s = Score::kMin; s <= Score::kMax; ++s) {
    const int i = scheme.bin_of(s);
    const std::int64_t w = balanced ? lcm / scheme.bin_size(i) : 1;
    const auto counts = noise::perturb_counts(Score(s), model);
    for (int t = Score::kMin; t <= Score::kMax; ++t) {
      const int c = counts[static_cast<std::size_t>(t - Score::kMin)];
      if (c > 0) out.counts(i, scheme.bin_of(t)) += c * w;
    }
  }
  const std::int64_t outcomes = 2LL * v + 1;
  out.denom = balanced ? outcomes * k * lcm : outcomes * Score::kLevels;
  return out;
}

int minority_bin_size(const BinningScheme& scheme) {
  int m = Score::kLevels;
  for (int i = 0; i < scheme.bin_count(); ++i) m = std::min(m, scheme.bin_size(i));
  return m;
}

}  // namespace

ExactWeights exact_balanced_weights(const BinningScheme& scheme, int v) {
  return enumerate(scheme, v, /*balanced=*/true);
}

ExactWeights exact_population_weights(const BinningScheme& scheme, int v) {
  return enumerate(scheme, v, /*balanced=*/false);
}

BoundPoint exact_bounds(const BinningScheme& scheme, int v) {
  const int k = scheme.bin_count();
  const ExactWeights bal = exact_balanced_weights(scheme, v);
  const ExactWeights pop = exact_population_weights(scheme, v);

  BoundPoint point;
  point.v = v;

  // All ratios are single divisions of exact integers, so spot values like
  // 44/54 survive bit-exactly.
  std::int64_t trace = 0;
  for (int i = 0; i < k; ++i) trace += bal.counts(i, i);
  point.accuracy_upper = static_cast<double>(trace) / static_cast<double>(bal.denom);

  double precision_sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const std::int64_t row = bal.counts.row(i).sum();
    precision_sum += static_cast<double>(bal.counts(i, i)) / static_cast<double>(row);
  }
  point.precision_upper = precision_sum / k;

  point.class_shares = Eigen::VectorXd(k);
  point.class_shares_total = Eigen::VectorXd(k);
  std::int64_t max_col = 0;
  std::int64_t sq_sum = 0;
  const std::int64_t min_bin = minority_bin_size(scheme);
  for (int j = 0; j < k; ++j) {
    const std::int64_t col = bal.counts.col(j).sum();
    point.class_shares(j) = static_cast<double>(col) / static_cast<double>(bal.denom);
    point.class_shares_total(j) = static_cast<double>(col * k * min_bin) /
                                  static_cast<double>(bal.denom * Score::kLevels);
    max_col = std::max(max_col, col);
    sq_sum += col * col;
  }
  point.lower_majority = static_cast<double>(max_col) / static_cast<double>(bal.denom);
  point.lower_prior_matched =
      static_cast<double>(sq_sum) / static_cast<double>(bal.denom * bal.denom);

  const auto nps_of = [](const Int64Matrix& counts, std::int64_t denom, bool columns) {
    const int kk = static_cast<int>(counts.rows());
    const std::int64_t top = columns ? counts.col(kk - 1).sum() : counts.row(kk - 1).sum();
    const std::int64_t bottom = columns ? counts.col(0).sum() : counts.row(0).sum();
    return 100.0 * static_cast<double>(top - bottom) / static_cast<double>(denom);
  };
  point.nps_unbiased = nps_of(pop.counts, pop.denom, /*columns=*/false);
  point.nps_biased = nps_of(pop.counts, pop.denom, /*columns=*/true);
  point.nps_balanced = nps_of(bal.counts, bal.denom, /*columns=*/true);
  return point;
}

BoundPoint mc_bounds(const BinningScheme& scheme, int v, int n,
                     const resample::ResamplePlan& plan) {
  check_v(v);
  const int k = scheme.bin_count();
  if (n < 10 * k) {
    throw ValidationError("mc_bounds needs n >= 10 * k (got n=" + std::to_string(n) + ")");
  }

  const noise::Rng root{plan.rng};
  noise::Rng synth_rng = root.substream(0);
  noise::Rng noise_rng = root.substream(1);
  Dataset data = noise::generate_synth(n, synth_rng);
  data = noise::apply_noise(data, noise::NoiseModel(v), noise_rng);

  std::vector<int> unbiased_cat(static_cast<std::size_t>(n));
  std::vector<int> biased_cat(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& r = data.records[static_cast<std::size_t>(i)];
    unbiased_cat[static_cast<std::size_t>(i)] = scheme.bin_of(r.unbiased_score->value());
    biased_cat[static_cast<std::size_t>(i)] = scheme.bin_of(r.biased_score.value());
  }

  const resample::CategoryGroups groups =
      resample::group_by_unbiased_category(data, scheme);
  std::size_t minority = SIZE_MAX;
  for (const auto& g : groups.indices) minority = std::min(minority, g.size());

  // Balanced quantities: [accuracy, precision, majority, prior-matched,
  // shares(0..k-1), nps_balanced] per resample iteration.
  resample::ResamplePlan balanced_plan = plan;
  balanced_plan.rng = root.substream(2).spec();
  Eigen::MatrixXd cells(k, k);
  const auto balanced_metric = [&](std::span<const int> sample) {
    cells.setZero();
    for (int idx : sample) {
      cells(unbiased_cat[static_cast<std::size_t>(idx)],
            biased_cat[static_cast<std::size_t>(idx)]) += 1.0;
    }
    const double total = static_cast<double>(sample.size());
    Eigen::VectorXd stats(4 + k + 1);
    stats(0) = cells.trace() / total;
    double prec = 0.0;
    for (int i = 0; i < k; ++i) {
      const double row = cells.row(i).sum();
      if (row > 0.0) prec += cells(i, i) / row;
    }
    stats(1) = prec / k;
    const Eigen::VectorXd cols = cells.colwise().sum();
    stats(2) = cols.maxCoeff() / total;
    stats(3) = cols.squaredNorm() / (total * total);
    stats.segment(4, k) = cols / total;
    stats(4 + k) = 100.0 * (cols(k - 1) - cols(0)) / total;
    return stats;
  };
  const auto [bal_mean, bal_std] =
      resample::balanced_ensemble_vec(groups, balanced_plan, balanced_metric);

  // Population NPS via bootstrap: a single all-records "class" resampled to
  // the full size reuses the ensemble machinery.
  resample::CategoryGroups whole;
  whole.indices.emplace_back(n);
  std::iota(whole.indices[0].begin(), whole.indices[0].end(), 0);
  whole.labels.push_back("all");
  resample::ResamplePlan boot_plan = plan;
  boot_plan.per_class_size = n;
  boot_plan.with_replacement = true;
  boot_plan.rng = root.substream(3).spec();
  const auto nps_metric = [&](std::span<const int> sample) {
    int top_u = 0, bot_u = 0, top_b = 0, bot_b = 0;
    for (int idx : sample) {
      const int cu = unbiased_cat[static_cast<std::size_t>(idx)];
      const int cb = biased_cat[static_cast<std::size_t>(idx)];
      top_u += cu == k - 1;
      bot_u += cu == 0;
      top_b += cb == k - 1;
      bot_b += cb == 0;
    }
    const double total = static_cast<double>(sample.size());
    Eigen::VectorXd stats(2);
    stats(0) = 100.0 * (top_u - bot_u) / total;
    stats(1) = 100.0 * (top_b - bot_b) / total;
    return stats;
  };
  const auto [nps_mean, nps_std] =
      resample::balanced_ensemble_vec(whole, boot_plan, nps_metric);

  const int m = balanced_plan.per_class_size.value_or(static_cast<int>(minority));
  const double total_scale = static_cast<double>(k) * m / n;

  BoundPoint point;
  point.v = v;
  point.accuracy_upper = bal_mean(0);
  point.precision_upper = bal_mean(1);
  point.lower_majority = bal_mean(2);
  point.lower_prior_matched = bal_mean(3);
  point.class_shares = bal_mean.segment(4, k);
  point.class_shares_total = point.class_shares * total_scale;
  point.nps_balanced = bal_mean(4 + k);
  point.nps_unbiased = nps_mean(0);
  point.nps_biased = nps_mean(1);

  BoundStd std_out;
  std_out.accuracy_upper = bal_std(0);
  std_out.precision_upper = bal_std(1);
  std_out.lower_majority = bal_std(2);
  std_out.lower_prior_matched = bal_std(3);
  std_out.class_shares = bal_std.segment(4, k);
  std_out.nps_balanced = bal_std(4 + k);
  std_out.nps_unbiased = nps_std(0);
  std_out.nps_biased = nps_std(1);
  point.std = std::move(std_out);
  return point;
}

BoundCurve bound_curve(const BinningScheme& scheme, int v_max, Method method,
                       int n, const resample::ResamplePlan& plan) {
  check_v(v_max);
  BoundCurve curve{scheme, method, {}, method == Method::kMonteCarlo ? n : 0};
  curve.points.reserve(static_cast<std::size_t>(v_max) + 1);
  const noise::Rng root{plan.rng};
  for (int v = 0; v <= v_max; ++v) {
    if (method == Method::kExact) {
      curve.points.push_back(exact_bounds(scheme, v));
    } else {
      resample::ResamplePlan plan_v = plan;
      plan_v.rng = root.substream(static_cast<std::uint64_t>(v)).spec();
      curve.points.push_back(mc_bounds(scheme, v, n, plan_v));
    }
  }
  return curve;
}

}  // namespace survey::bounds
