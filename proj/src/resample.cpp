#include "survey/resample.hpp"

#include <algorithm>
#include <cmath>

namespace survey::resample {

namespace {

CategoryGroups group_records(const Dataset& dataset, const BinningScheme& scheme,
                             bool use_unbiased) {
  dataset.validate();
  CategoryGroups groups;
  groups.indices.resize(static_cast<std::size_t>(scheme.bin_count()));
  groups.labels = scheme.labels();
  for (int i = 0; i < dataset.size(); ++i) {
    const auto& r = dataset.records[static_cast<std::size_t>(i)];
    Score s = r.biased_score;
    if (use_unbiased) {
      if (!r.unbiased_score) {
        throw ValidationError("record " + r.id + " lacks an unbiased score");
      }
      s = *r.unbiased_score;
    }
    groups.indices[static_cast<std::size_t>(scheme.bin_of(s.value()))].push_back(i);
  }
  return groups;
}

int resolve_per_class_size(const CategoryGroups& groups, const ResamplePlan& plan) {
  std::size_t minority = SIZE_MAX;
  for (std::size_t c = 0; c < groups.indices.size(); ++c) {
    if (groups.indices[c].empty()) {
      const std::string label =
          c < groups.labels.size() ? groups.labels[c] : std::to_string(c);
      throw ValidationError("category '" + label + "' has no records");
    }
    minority = std::min(minority, groups.indices[c].size());
  }
  const int size = plan.per_class_size.value_or(static_cast<int>(minority));
  if (size < 1) throw ValidationError("per_class_size must be >= 1");
  if (!plan.with_replacement && static_cast<std::size_t>(size) > minority) {
    throw ValidationError("per_class_size exceeds minority class for sampling "
                          "without replacement");
  }
  return size;
}

void draw_class(const std::vector<int>& pool, int m, bool with_replacement,
                noise::Rng& rng, std::vector<int>& out) {
  const int n = static_cast<int>(pool.size());
  if (with_replacement) {
    for (int j = 0; j < m; ++j) out.push_back(pool[static_cast<std::size_t>(rng.uniform_int(0, n - 1))]);
    return;
  }
  // partial Fisher-Yates over a scratch copy
  std::vector<int> scratch = pool;
  for (int j = 0; j < m; ++j) {
    const int pick = rng.uniform_int(j, n - 1);
    std::swap(scratch[static_cast<std::size_t>(j)], scratch[static_cast<std::size_t>(pick)]);
    out.push_back(scratch[static_cast<std::size_t>(j)]);
  }
}

}  // namespace

CategoryGroups group_by_unbiased_category(const Dataset& dataset,
                                          const BinningScheme& scheme) {
  return group_records(dataset, scheme, /*use_unbiased=*/true);
}

CategoryGroups group_by_biased_category(const Dataset& dataset,
                                        const BinningScheme& scheme) {
  return group_records(dataset, scheme, /*use_unbiased=*/false);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> balanced_ensemble_vec(
    const CategoryGroups& groups, const ResamplePlan& plan,
    const std::function<Eigen::VectorXd(std::span<const int>)>& metric) {
  if (plan.iterations < 1) throw ValidationError("iterations must be >= 1");
  const int m = resolve_per_class_size(groups, plan);
  const noise::Rng base{plan.rng};

  Eigen::VectorXd mean, m2;  // Welford accumulators
  std::vector<int> sample;
  sample.reserve(groups.indices.size() * static_cast<std::size_t>(m));
  for (int it = 0; it < plan.iterations; ++it) {
    noise::Rng rng = base.substream(static_cast<std::uint64_t>(it));
    sample.clear();
    for (const auto& pool : groups.indices) {
      draw_class(pool, m, plan.with_replacement, rng, sample);
    }
    const Eigen::VectorXd value = metric(sample);
    if (!value.allFinite()) {
      throw ValidationError("metric returned a non-finite value at iteration " +
                            std::to_string(it));
    }
    if (it == 0) {
      mean = Eigen::VectorXd::Zero(value.size());
      m2 = Eigen::VectorXd::Zero(value.size());
    } else if (value.size() != mean.size()) {
      throw ValidationError("metric returned vectors of varying length");
    }
    const Eigen::VectorXd delta = value - mean;
    mean += delta / (it + 1.0);
    m2 += delta.cwiseProduct(value - mean);
  }
  Eigen::VectorXd std_dev = Eigen::VectorXd::Zero(mean.size());
  if (plan.iterations > 1) {
    std_dev = (m2 / (plan.iterations - 1.0)).cwiseMax(0.0).cwiseSqrt();
  }
  return {mean, std_dev};
}

EnsembleEstimate balanced_ensemble(
    const CategoryGroups& groups, const ResamplePlan& plan,
    const std::function<double(std::span<const int>)>& metric) {
  auto [mean, std_dev] = balanced_ensemble_vec(
      groups, plan, [&](std::span<const int> sample) {
        Eigen::VectorXd v(1);
        v(0) = metric(sample);
        return v;
      });
  return EnsembleEstimate{mean(0), std_dev(0), plan.iterations};
}

}  // namespace survey::resample
