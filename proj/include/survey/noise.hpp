#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <random>

#include "survey/core.hpp"

namespace survey::noise {

// Clipped discrete-uniform respondent noise: a survey answer is
// clamp(score + u, 1, 10) with u uniform on the integers -v..+v.
struct NoiseModel {
  int half_width = 0;  // v, in score units

  explicit NoiseModel(int v);
};

// Identifies one reproducible draw sequence. Identical (seed, stream)
// pairs yield identical sequences within one build.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Seeded generator with rejection-sampled bounded draws (no modulo bias).
class Rng {
 public:
  explicit Rng(RngSpec spec);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform integer in [lo, hi], both inclusive.
  int uniform_int(int lo, int hi);
  // Independent child stream; deterministic in (spec, index).
  Rng substream(std::uint64_t index) const;

  const RngSpec& spec() const { return spec_; }

 private:
  RngSpec spec_;
  std::mt19937_64 engine_;
};

// One noisy draw of a survey answer around the unbiased score.
Score perturb(Score score, const NoiseModel& model, Rng& rng);

// Exact outcome distribution of perturb as integer counts over the
// denominator 2v+1; index = outcome score - 1. Clipped outcomes are
// absorbed into the boundary cells.
std::array<int, Score::kLevels> perturb_counts(Score score, const NoiseModel& model);

// Same distribution as probabilities; entries sum to 1 within 1e-12.
Eigen::VectorXd perturb_pmf(Score score, const NoiseModel& model);

// n records with unbiased scores uniform on 1..10 and biased == unbiased.
Dataset generate_synth(int n, Rng& rng);

// Copy of the dataset with each biased score replaced by an independent
// perturb draw of its unbiased score.
Dataset apply_noise(const Dataset& dataset, const NoiseModel& model, Rng& rng);

}  // namespace survey::noise
