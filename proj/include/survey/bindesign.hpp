#pragma once

#include <string>
#include <vector>

#include "survey/bounds.hpp"
#include "survey/core.hpp"

namespace survey::bindesign {

// All contiguous partitions of 1..10 into k non-empty bins, lexicographic
// by cut position. C(9, k-1) schemes: 9 for k=2, 36 for k=3.
std::vector<BinningScheme> enumerate_schemes(int k);

// k=3: narrow/medium/wide by middle-bin length (<3 / 3-5 / >=6).
// k=2: the top-bin length rendered as an integer label.
std::string width_class(const BinningScheme& scheme);

struct GroupCurve {
  std::string group;
  std::vector<double> mean;  // unweighted mean over member schemes, per v
  std::vector<double> min;
  std::vector<double> max;
};

struct DesignSweep {
  int k = 3;
  int v_max = 9;
  std::vector<BinningScheme> schemes;
  std::vector<std::string> groups;            // width class per scheme
  std::vector<std::vector<double>> accuracy;  // [scheme][v] exact balanced accuracy upper bound
  std::vector<GroupCurve> group_curves;       // ordered by first appearance
  std::vector<std::string> best_group_per_v;  // group of the best scheme at each v
  std::vector<double> envelope_spread;        // max - min accuracy over all schemes, per v
};

DesignSweep sweep(int k, int v_max);

}  // namespace survey::bindesign
