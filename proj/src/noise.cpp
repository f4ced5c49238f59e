#include "survey/noise.hpp"

#include <algorithm>
#include <limits>

namespace survey::noise {

namespace {

// splitmix64; used only to turn (seed, stream) into engine seed material.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

NoiseModel::NoiseModel(int v) : half_width(v) {
  if (v < 0 || v > Score::kLevels - 1) {
    throw ValidationError("noise half-width " + std::to_string(v) +
                          " outside [0, " + std::to_string(Score::kLevels - 1) + "]");
  }
}

Rng::Rng(RngSpec spec)
    : spec_(spec), engine_(mix(mix(spec.seed) ^ mix(spec.stream + 0x632be59bd9b4e019ULL))) {}

int Rng::uniform_int(int lo, int hi) {
  if (lo > hi) throw ValidationError("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  // Rejection over the largest multiple of span below 2^64.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % span + 1) % span;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw > limit);
  return lo + static_cast<int>(draw % span);
}

Rng Rng::substream(std::uint64_t index) const {
  return Rng(RngSpec{spec_.seed, mix(spec_.stream) ^ mix(index + 1)});
}

Score perturb(Score score, const NoiseModel& model, Rng& rng) {
  const int u = rng.uniform_int(-model.half_width, model.half_width);
  return Score(std::clamp(score.value() + u, Score::kMin, Score::kMax));
}

std::array<int, Score::kLevels> perturb_counts(Score score, const NoiseModel& model) {
  std::array<int, Score::kLevels> counts{};
  for (int u = -model.half_width; u <= model.half_width; ++u) {
    const int t = std::clamp(score.value() + u, Score::kMin, Score::kMax);
    ++counts[static_cast<std::size_t>(t - Score::kMin)];
  }
  return counts;
}

Eigen::VectorXd perturb_pmf(Score score, const NoiseModel& model) {
  const auto counts = perturb_counts(score, model);
  const double denom = 2.0 * model.half_width + 1.0;
  Eigen::VectorXd pmf(Score::kLevels);
  for (int i = 0; i < Score::kLevels; ++i) pmf(i) = counts[static_cast<std::size_t>(i)] / denom;
  return pmf;
}

Dataset generate_synth(int n, Rng& rng) {
  if (n < 1) throw ValidationError("generate_synth needs n >= 1");
  Dataset out;
  out.records.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Score s(rng.uniform_int(Score::kMin, Score::kMax));
    out.records.push_back(SurveyRecord{
        .id = std::to_string(i + 1),
        .unbiased_score = s,
        .biased_score = s,
        .features = std::nullopt,
        .self_category = std::nullopt,
    });
  }
  return out;
}

Dataset apply_noise(const Dataset& dataset, const NoiseModel& model, Rng& rng) {
  dataset.validate();
  Dataset out = dataset;
  for (auto& r : out.records) {
    if (!r.unbiased_score) {
      throw ValidationError("apply_noise: record " + r.id + " lacks an unbiased score");
    }
    r.biased_score = perturb(*r.unbiased_score, model, rng);
  }
  return out;
}

}  // namespace survey::noise
