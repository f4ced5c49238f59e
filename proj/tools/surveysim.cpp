#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <sstream>

#include "survey/bindesign.hpp"
#include "survey/bounds.hpp"
#include "survey/calibrate.hpp"
#include "survey/core.hpp"
#include "survey/io.hpp"
#include "survey/noise.hpp"
#include "survey/stats.hpp"

namespace {

using nlohmann::json;
using survey::BinningScheme;
using survey::Dataset;
using survey::Score;

std::uint64_t materialize_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw survey::ValidationError("cannot write '" + out_path + "'");
  out << content;
}

void emit_report(const std::string& out_path, const json& report) {
  emit(out_path, report.dump(2) + "\n");
}

struct SeedOption {
  std::optional<std::uint64_t> value;
};

void add_seed_flag(CLI::App* cmd, SeedOption& seed) {
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&seed](std::uint64_t v) { seed.value = v; },
      "RNG seed (auto-generated and reported when omitted)");
}

int run(int argc, char** argv) {
  CLI::App app{"Ordinal-survey noise simulation and variability estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("surveysim ") + survey::kVersion);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a uniform-score dataset CSV");
  int synth_n = 10000;
  int synth_v = 0;
  bool synth_onehot = false;
  std::string synth_out;
  SeedOption synth_seed;
  synth->add_option("--n", synth_n, "number of respondents")->check(CLI::PositiveNumber);
  synth->add_option("--v", synth_v, "noise half-width applied to the biased scores")
      ->check(CLI::Range(0, Score::kLevels - 1));
  synth->add_flag("--onehot", synth_onehot,
                  "attach one-hot indicators of the unbiased score as features");
  synth->add_option("-o,--out", synth_out, "output path (default stdout)");
  add_seed_flag(synth, synth_seed);

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "Bound/share/NPS curve for a scheme");
  std::string bounds_scheme = "1-6,7-8,9-10";
  std::string bounds_method = "exact";
  int bounds_vmax = 9;
  int bounds_n = 10000;
  int bounds_iterations = 1000;
  std::string bounds_out;
  SeedOption bounds_seed;
  bounds_cmd->add_option("--scheme", bounds_scheme, "bins, e.g. 1-6,7-8,9-10");
  bounds_cmd->add_option("--method", bounds_method, "exact or mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  bounds_cmd->add_option("--vmax", bounds_vmax)->check(CLI::Range(0, Score::kLevels - 1));
  bounds_cmd->add_option("--n", bounds_n, "Monte Carlo sample size")
      ->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--iterations", bounds_iterations, "resample iterations")
      ->check(CLI::PositiveNumber);
  std::string bounds_format = "csv";
  bounds_cmd->add_option("--format", bounds_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  bounds_cmd->add_option("-o,--out", bounds_out, "output path (default stdout)");
  add_seed_flag(bounds_cmd, bounds_seed);

  // sweep-bins
  auto* sweep_cmd = app.add_subcommand("sweep-bins",
                                       "Exact accuracy bound for every k-bin design");
  int sweep_k = 3;
  int sweep_vmax = 9;
  std::string sweep_out;
  SeedOption sweep_seed;
  sweep_cmd->add_option("--k", sweep_k, "bins per scheme")->check(CLI::IsMember({2, 3}));
  sweep_cmd->add_option("--vmax", sweep_vmax)->check(CLI::Range(0, Score::kLevels - 1));
  sweep_cmd->add_option("-o,--out", sweep_out, "output path (default stdout)");
  add_seed_flag(sweep_cmd, sweep_seed);

  // rmse-curve
  auto* rmse_cmd = app.add_subcommand("rmse-curve",
                                      "RMSE of biased-on-unbiased regression per v");
  int rmse_vmax = 9;
  int rmse_n = 10000;
  std::string rmse_out;
  SeedOption rmse_seed;
  rmse_cmd->add_option("--vmax", rmse_vmax)->check(CLI::Range(1, Score::kLevels - 1));
  rmse_cmd->add_option("--n", rmse_n)->check(CLI::PositiveNumber);
  rmse_cmd->add_option("-o,--out", rmse_out, "output path (default stdout)");
  add_seed_flag(rmse_cmd, rmse_seed);

  // estimate
  auto* est_cmd = app.add_subcommand("estimate",
                                     "Estimate intrinsic variability of a survey CSV");
  std::string est_input;
  std::string est_scheme = "1-6,7-8,9-10";
  std::string est_score_col = "score";
  int est_vmax = 9;
  int est_n = 10000;
  int est_iterations = 1000;
  std::optional<double> est_actual;
  std::string est_out;
  SeedOption est_seed;
  est_cmd->add_option("input", est_input, "survey CSV path")->required();
  est_cmd->add_option("--scheme", est_scheme);
  est_cmd->add_option("--score-col", est_score_col, "name of the score column");
  est_cmd->add_option("--vmax", est_vmax)->check(CLI::Range(1, Score::kLevels - 1));
  est_cmd->add_option("--n", est_n, "synthetic sample size for the reference curve")
      ->check(CLI::PositiveNumber);
  est_cmd->add_option("--iterations", est_iterations)->check(CLI::PositiveNumber);
  est_cmd->add_option_function<double>(
      "--actual", [&est_actual](double v) { est_actual = v; },
      "achieved model accuracy, reported relative to the ceiling");
  est_cmd->add_option("-o,--out", est_out, "output path (default stdout)");
  add_seed_flag(est_cmd, est_seed);

  // chi2
  auto* chi2_cmd = app.add_subcommand("chi2",
                                      "Compare two count files for uniformity");
  std::string chi2_uncal, chi2_cal, chi2_out;
  chi2_cmd->add_option("uncalibrated", chi2_uncal, "count CSV")->required();
  chi2_cmd->add_option("calibrated", chi2_cal, "count CSV")->required();
  chi2_cmd->add_option("-o,--out", chi2_out, "output path (default stdout)");

  // city-stats
  auto* city_cmd = app.add_subcommand("city-stats",
                                      "Spread and score/category crosstab of responses");
  std::string city_input, city_out;
  std::string city_score_col = "score";
  city_cmd->add_option("input", city_input, "response-level CSV")->required();
  city_cmd->add_option("--score-col", city_score_col);
  city_cmd->add_option("-o,--out", city_out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    const std::uint64_t seed = materialize_seed(synth_seed.value);
    survey::noise::Rng root{{seed, 0}};
    survey::noise::Rng synth_rng = root.substream(0);
    Dataset data = survey::noise::generate_synth(synth_n, synth_rng);
    if (synth_v > 0) {
      survey::noise::Rng noise_rng = root.substream(1);
      data = survey::noise::apply_noise(data, survey::noise::NoiseModel(synth_v), noise_rng);
    }
    if (synth_onehot) {
      for (int level = Score::kMin; level <= Score::kMax; ++level) {
        data.feature_names.push_back("u" + std::to_string(level));
      }
      for (auto& r : data.records) {
        Eigen::VectorXd onehot = Eigen::VectorXd::Zero(Score::kLevels);
        onehot(r.unbiased_score->value() - Score::kMin) = 1.0;
        r.features = std::move(onehot);
      }
    }
    std::ostringstream command;
    command << "synth --n " << synth_n << " --v " << synth_v
            << (synth_onehot ? " --onehot" : "") << " --seed " << seed;
    std::ostringstream out;
    survey::io::write_dataset_csv(out, data, {command.str(), seed, true});
    emit(synth_out, out.str());
    return 0;
  }

  if (bounds_cmd->parsed()) {
    const BinningScheme scheme = survey::io::parse_scheme(bounds_scheme);
    const bool exact = bounds_method == "exact";
    std::ostringstream command;
    command << "bounds --scheme " << scheme.spec_string() << " --method "
            << bounds_method << " --vmax " << bounds_vmax << " --format "
            << bounds_format;
    survey::io::RunInfo info{command.str(), std::nullopt, !exact, {}};
    if (scheme.bin_count() == 2) {
      info.notes.push_back("two-bin NPS treats the high bin as promoters and the "
                           "low bin as detractors (a convention, not a survey rule)");
    }
    survey::bounds::BoundCurve curve{scheme, survey::bounds::Method::kExact, {}, 0};
    if (exact) {
      if (bounds_seed.value) info.seed = *bounds_seed.value;  // noted as ignored
      curve = survey::bounds::bound_curve(scheme, bounds_vmax,
                                          survey::bounds::Method::kExact);
    } else {
      const std::uint64_t seed = materialize_seed(bounds_seed.value);
      command << " --n " << bounds_n << " --iterations " << bounds_iterations
              << " --seed " << seed;
      info.command = command.str();
      info.seed = seed;
      survey::resample::ResamplePlan plan;
      plan.iterations = bounds_iterations;
      plan.rng = {seed, 0};
      curve = survey::bounds::bound_curve(scheme, bounds_vmax,
                                          survey::bounds::Method::kMonteCarlo,
                                          bounds_n, plan);
    }
    if (bounds_format == "json") {
      json config{{"command", info.command}};
      if (info.seed) config["seed"] = *info.seed;
      emit_report(bounds_out,
                  survey::io::make_report(config, survey::io::to_json(curve), info.notes));
    } else {
      std::ostringstream out;
      survey::io::write_curve_csv(out, curve, info);
      emit(bounds_out, out.str());
    }
    return 0;
  }

  if (sweep_cmd->parsed()) {
    std::ostringstream command;
    command << "sweep-bins --k " << sweep_k << " --vmax " << sweep_vmax;
    survey::io::RunInfo info{command.str(), sweep_seed.value, false};
    const auto sweep = survey::bindesign::sweep(sweep_k, sweep_vmax);
    std::ostringstream out;
    survey::io::write_sweep_csv(out, sweep, info);
    emit(sweep_out, out.str());
    return 0;
  }

  if (rmse_cmd->parsed()) {
    const std::uint64_t seed = materialize_seed(rmse_seed.value);
    survey::noise::Rng rng{{seed, 0}};
    const auto curve = survey::calibrate::synth_rmse_curve(rmse_vmax, rmse_n, rng);
    std::ostringstream command;
    command << "rmse-curve --vmax " << rmse_vmax << " --n " << rmse_n
            << " --seed " << seed;
    std::ostringstream out;
    survey::io::write_rmse_csv(out, curve, {command.str(), seed, true});
    emit(rmse_out, out.str());
    return 0;
  }

  if (est_cmd->parsed()) {
    const std::uint64_t seed = materialize_seed(est_seed.value);
    const BinningScheme scheme = survey::io::parse_scheme(est_scheme);
    auto loaded = survey::io::read_survey_csv(est_input, {est_score_col});

    survey::noise::Rng root{{seed, 0}};
    survey::noise::Rng curve_rng = root.substream(0);
    const auto curve = survey::calibrate::synth_rmse_curve(est_vmax, est_n, curve_rng);
    survey::resample::ResamplePlan plan;
    plan.iterations = est_iterations;
    plan.rng = root.substream(1).spec();
    const auto report = survey::calibrate::estimate_from_dataset(
        loaded.dataset, scheme, curve, plan, est_actual);

    json config{{"command", "estimate"},
                {"input", est_input},
                {"scheme", scheme.spec_string()},
                {"score_column", est_score_col},
                {"vmax", est_vmax},
                {"n", est_n},
                {"iterations", est_iterations},
                {"seed", seed}};
    if (est_actual) config["actual"] = *est_actual;
    std::vector<std::string> warnings = loaded.warnings;
    emit_report(est_out,
                survey::io::make_report(config, survey::io::to_json(report), warnings));
    return 0;
  }

  if (chi2_cmd->parsed()) {
    const auto uncal = survey::io::read_count_csv(chi2_uncal);
    const auto cal = survey::io::read_count_csv(chi2_cal);
    const auto comparison = survey::stats::compare_uniformity(uncal, cal);
    json config{{"command", "chi2"},
                {"uncalibrated", chi2_uncal},
                {"calibrated", chi2_cal}};
    emit_report(chi2_out,
                survey::io::make_report(config, survey::io::to_json(comparison), {}));
    return 0;
  }

  if (city_cmd->parsed()) {
    auto loaded = survey::io::read_survey_csv(city_input, {city_score_col});
    std::vector<double> values;
    std::vector<int> scores;
    std::vector<std::string> labels;
    for (const auto& r : loaded.dataset.records) {
      values.push_back(r.biased_score.value());
      if (r.self_category) {
        scores.push_back(r.biased_score.value());
        labels.push_back(*r.self_category);
      }
    }
    json results{{"spread", survey::io::to_json(survey::stats::describe_spread(values))},
                 {"respondents", loaded.dataset.size()}};
    if (!scores.empty()) {
      results["crosstab"] = survey::io::to_json(survey::stats::crosstab(scores, labels));
    }
    json config{{"command", "city-stats"},
                {"input", city_input},
                {"score_column", city_score_col}};
    emit_report(city_out, survey::io::make_report(config, results, loaded.warnings));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const survey::ValidationError& e) {
    std::cerr << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump()
              << "\n";
    return 2;
  }
}
