#pragma once

#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "survey/bindesign.hpp"
#include "survey/bounds.hpp"
#include "survey/calibrate.hpp"
#include "survey/core.hpp"
#include "survey/stats.hpp"

namespace survey::io {

// "1-6,7-8,9-10" -> validated scheme with default labels. Single numbers
// ("1,2-9,10") denote one-score bins.
BinningScheme parse_scheme(const std::string& text);

struct CsvOptions {
  std::string score_column = "score";
};

struct LoadResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

// Survey CSV: header row; integer score column required; optional
// unbiased_score / self_category / id columns; every other column becomes a
// feature (numeric passed through with mean imputation of missing values,
// non-numeric one-hot encoded).
LoadResult read_survey_csv(const std::string& path, const CsvOptions& options = {});

// Count CSV: columns score,count with scores in 1..10; absent scores are 0.
stats::CountVector read_count_csv(const std::string& path);

// Provenance header embedded in every artifact so a run can be repeated.
struct RunInfo {
  std::string command;                     // rendered argv
  std::optional<std::uint64_t> seed;       // absent for exact-only commands
  bool seed_used = true;                   // false when the method ignores it
  std::vector<std::string> notes;          // extra "# note:" header lines
};

// Numbers rendered with 12 significant digits ("%.12g"), so identical
// inputs produce byte-identical files.
std::string format_double(double value);

void write_dataset_csv(std::ostream& out, const Dataset& dataset, const RunInfo& info);
void write_curve_csv(std::ostream& out, const bounds::BoundCurve& curve, const RunInfo& info);
void write_sweep_csv(std::ostream& out, const bindesign::DesignSweep& sweep, const RunInfo& info);
void write_rmse_csv(std::ostream& out, const calibrate::RmseCurve& curve, const RunInfo& info);

// JSON report envelope: tool version + config echo + results + warnings.
nlohmann::json make_report(const nlohmann::json& config, const nlohmann::json& results,
                           const std::vector<std::string>& warnings);

nlohmann::json to_json(const bounds::BoundCurve& curve);
nlohmann::json to_json(const calibrate::EstimateReport& report);
nlohmann::json to_json(const stats::UniformityComparison& comparison);
nlohmann::json to_json(const stats::Chi2Result& result);
nlohmann::json to_json(const stats::SpreadSummary& summary);
nlohmann::json to_json(const stats::Crosstab& table);

}  // namespace survey::io
