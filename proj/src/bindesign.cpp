#include "survey/bindesign.hpp"

#include <algorithm>

namespace survey::bindesign {

std::vector<BinningScheme> enumerate_schemes(int k) {
  if (k != 2 && k != 3) {
    throw ValidationError("scheme enumeration supports k in {2, 3}, got " +
                          std::to_string(k));
  }
  std::vector<BinningScheme> out;
  if (k == 2) {
    for (int a = Score::kMin; a < Score::kMax; ++a) {
      out.emplace_back(std::vector<int>{a, Score::kMax}, default_labels(2));
    }
    return out;
  }
  for (int a = Score::kMin; a < Score::kMax - 1; ++a) {
    for (int b = a + 1; b < Score::kMax; ++b) {
      out.emplace_back(std::vector<int>{a, b, Score::kMax}, default_labels(3));
    }
  }
  return out;
}

std::string width_class(const BinningScheme& scheme) {
  const int k = scheme.bin_count();
  if (k == 3) {
    const int mid = scheme.bin_size(1);
    if (mid < 3) return "narrow";
    if (mid <= 5) return "medium";
    return "wide";
  }
  if (k == 2) return std::to_string(scheme.bin_size(1));
  throw ValidationError("width_class supports k in {2, 3}, got " + std::to_string(k));
}

DesignSweep sweep(int k, int v_max) {
  DesignSweep result;
  result.k = k;
  result.v_max = v_max;
  result.schemes = enumerate_schemes(k);

  const std::size_t n_schemes = result.schemes.size();
  result.groups.reserve(n_schemes);
  result.accuracy.assign(n_schemes, std::vector<double>(static_cast<std::size_t>(v_max) + 1));
  for (std::size_t i = 0; i < n_schemes; ++i) {
    result.groups.push_back(width_class(result.schemes[i]));
    for (int v = 0; v <= v_max; ++v) {
      result.accuracy[i][static_cast<std::size_t>(v)] =
          bounds::exact_bounds(result.schemes[i], v).accuracy_upper;
    }
  }

  std::vector<std::string> group_order;
  for (const auto& g : result.groups) {
    if (std::find(group_order.begin(), group_order.end(), g) == group_order.end()) {
      group_order.push_back(g);
    }
  }
  for (const auto& g : group_order) {
    GroupCurve curve;
    curve.group = g;
    for (int v = 0; v <= v_max; ++v) {
      double sum = 0.0, lo = 1.0, hi = 0.0;
      int members = 0;
      for (std::size_t i = 0; i < n_schemes; ++i) {
        if (result.groups[i] != g) continue;
        const double a = result.accuracy[i][static_cast<std::size_t>(v)];
        sum += a;
        lo = std::min(lo, a);
        hi = std::max(hi, a);
        ++members;
      }
      curve.mean.push_back(sum / members);
      curve.min.push_back(lo);
      curve.max.push_back(hi);
    }
    result.group_curves.push_back(std::move(curve));
  }

  for (int v = 0; v <= v_max; ++v) {
    std::size_t best = 0;
    double lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < n_schemes; ++i) {
      const double a = result.accuracy[i][static_cast<std::size_t>(v)];
      if (a > result.accuracy[best][static_cast<std::size_t>(v)]) best = i;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    result.best_group_per_v.push_back(result.groups[best]);
    result.envelope_spread.push_back(hi - lo);
  }
  return result;
}

}  // namespace survey::bindesign
