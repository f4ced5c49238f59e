#include "survey/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

namespace survey::io {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

std::optional<double> parse_number(const std::string& s) {
  if (is_missing(s)) return std::nullopt;
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return std::nullopt;
  return value;
}

int parse_score_field(const std::string& s, int line_number, const std::string& column) {
  const auto value = parse_number(s);
  if (!value || *value != std::floor(*value)) {
    throw ValidationError("line " + std::to_string(line_number) + ": " + column +
                          " '" + s + "' is not an integer score");
  }
  const int score = static_cast<int>(*value);
  if (score < Score::kMin || score > Score::kMax) {
    throw ValidationError("line " + std::to_string(line_number) + ": " + column +
                          " " + std::to_string(score) + " outside [" +
                          std::to_string(Score::kMin) + ", " +
                          std::to_string(Score::kMax) + "]");
  }
  return score;
}

void write_info_header(std::ostream& out, const RunInfo& info) {
  out << "# surveysim " << kVersion << "\n";
  if (!info.command.empty()) out << "# command: " << info.command << "\n";
  if (info.seed) {
    out << "# seed: " << *info.seed;
    if (!info.seed_used) out << " (ignored: exact method is deterministic)";
    out << "\n";
  }
  for (const auto& note : info.notes) out << "# note: " << note << "\n";
}

}  // namespace

BinningScheme parse_scheme(const std::string& text) {
  std::vector<int> upper;
  int expected_low = Score::kMin;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    part = trim(part);
    int lo = 0, hi = 0;
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        lo = hi = std::stoi(part);
      } else {
        lo = std::stoi(part.substr(0, dash));
        hi = std::stoi(part.substr(dash + 1));
      }
    } catch (const std::exception&) {
      throw ValidationError("scheme range '" + part + "' is not numeric");
    }
    if (lo > hi) throw ValidationError("scheme range '" + part + "' is inverted");
    if (lo != expected_low) {
      if (lo > expected_low) {
        throw ValidationError("scheme '" + text + "' has a gap at " +
                              std::to_string(expected_low) + " (range '" + part + "')");
      }
      throw ValidationError("scheme '" + text + "' overlaps at range '" + part + "'");
    }
    upper.push_back(hi);
    expected_low = hi + 1;
  }
  if (upper.empty()) throw ValidationError("empty scheme text");
  if (upper.back() != Score::kMax) {
    throw ValidationError("scheme '" + text + "' does not cover the scale up to " +
                          std::to_string(Score::kMax));
  }
  return BinningScheme(upper, default_labels(static_cast<int>(upper.size())));
}

LoadResult read_survey_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");

  std::string line;
  int line_number = 0;
  do {
    if (!std::getline(in, line)) throw ValidationError("'" + path + "' is empty");
    ++line_number;
  } while (line.empty() || line[0] == '#');

  const std::vector<std::string> header = split_csv_line(line);
  const auto column_index = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };

  const auto score_col = column_index(options.score_column);
  if (!score_col) {
    throw ValidationError("'" + path + "' has no '" + options.score_column + "' column");
  }
  const auto unbiased_col = column_index("unbiased_score");
  const auto category_col = column_index("self_category");
  const auto id_col = column_index("id");

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == *score_col || (unbiased_col && c == *unbiased_col) ||
        (category_col && c == *category_col) || (id_col && c == *id_col)) {
      continue;
    }
    feature_cols.push_back(c);
  }

  LoadResult result;
  std::vector<std::vector<std::string>> raw_rows;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_number) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    const int score = parse_score_field(fields[*score_col], line_number,
                                        options.score_column);
    SurveyRecord record{
        .id = id_col ? fields[*id_col] : std::to_string(result.dataset.records.size() + 1),
        .unbiased_score = std::nullopt,
        .biased_score = Score(score),
        .features = std::nullopt,
        .self_category = std::nullopt,
    };
    if (unbiased_col && !is_missing(fields[*unbiased_col])) {
      record.unbiased_score =
          Score(parse_score_field(fields[*unbiased_col], line_number, "unbiased_score"));
    }
    if (category_col && !is_missing(fields[*category_col])) {
      record.self_category = fields[*category_col];
    }
    result.dataset.records.push_back(std::move(record));
    raw_rows.emplace_back();
    for (std::size_t c : feature_cols) raw_rows.back().push_back(fields[c]);
  }
  if (result.dataset.records.empty()) {
    throw ValidationError("'" + path + "' has no data rows");
  }
  if (feature_cols.empty()) {
    result.dataset.validate();
    return result;
  }

  // Column typing pass: numeric if every non-missing value parses.
  const std::size_t n = raw_rows.size();
  std::vector<std::vector<double>> encoded;  // one vector per output feature
  for (std::size_t f = 0; f < feature_cols.size(); ++f) {
    const std::string& name = header[feature_cols[f]];
    bool numeric = true;
    for (std::size_t r = 0; r < n && numeric; ++r) {
      const std::string& cell = raw_rows[r][f];
      if (!is_missing(cell) && !parse_number(cell)) numeric = false;
    }
    if (numeric) {
      std::vector<double> column(n, 0.0);
      double sum = 0.0;
      std::size_t present = 0;
      std::vector<std::size_t> missing_rows;
      for (std::size_t r = 0; r < n; ++r) {
        if (const auto value = parse_number(raw_rows[r][f])) {
          column[r] = *value;
          sum += *value;
          ++present;
        } else {
          missing_rows.push_back(r);
        }
      }
      if (present == 0) {
        throw ValidationError("feature column '" + name + "' has no values");
      }
      if (!missing_rows.empty()) {
        const double mean = sum / static_cast<double>(present);
        for (std::size_t r : missing_rows) column[r] = mean;
        result.warnings.push_back("column '" + name + "': " +
                                  std::to_string(missing_rows.size()) +
                                  " missing value(s) mean-imputed");
      }
      result.dataset.feature_names.push_back(name);
      encoded.push_back(std::move(column));
    } else {
      std::vector<std::string> levels;
      for (std::size_t r = 0; r < n; ++r) {
        const std::string& cell = raw_rows[r][f];
        if (is_missing(cell)) continue;
        if (std::find(levels.begin(), levels.end(), cell) == levels.end()) {
          levels.push_back(cell);
        }
      }
      bool any_missing = false;
      for (const auto& level : levels) {
        std::vector<double> column(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
          if (is_missing(raw_rows[r][f])) {
            any_missing = true;
          } else if (raw_rows[r][f] == level) {
            column[r] = 1.0;
          }
        }
        result.dataset.feature_names.push_back(name + "=" + level);
        encoded.push_back(std::move(column));
      }
      if (any_missing) {
        result.warnings.push_back("column '" + name +
                                  "': missing values encoded as all-zero indicators");
      }
    }
  }

  const std::size_t p = encoded.size();
  for (std::size_t r = 0; r < n; ++r) {
    Eigen::VectorXd features(static_cast<Eigen::Index>(p));
    for (std::size_t f = 0; f < p; ++f) features(static_cast<Eigen::Index>(f)) = encoded[f][r];
    result.dataset.records[r].features = std::move(features);
  }
  result.dataset.validate();
  return result;
}

stats::CountVector read_count_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  int line_number = 0;
  stats::CountVector counts;
  bool header_seen = false;
  std::array<bool, Score::kLevels> seen{};
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      if (fields.size() < 2 || fields[0] != "score" || fields[1] != "count") {
        throw ValidationError("'" + path + "' must start with a 'score,count' header");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 2) {
      throw ValidationError("line " + std::to_string(line_number) +
                            ": expected 'score,count'");
    }
    const int score = parse_score_field(fields[0], line_number, "score");
    const auto count = parse_number(fields[1]);
    if (!count || *count < 0 || *count != std::floor(*count)) {
      throw ValidationError("line " + std::to_string(line_number) + ": count '" +
                            fields[1] + "' is not a non-negative integer");
    }
    if (seen[static_cast<std::size_t>(score - 1)]) {
      throw ValidationError("line " + std::to_string(line_number) + ": duplicate score " +
                            std::to_string(score));
    }
    seen[static_cast<std::size_t>(score - 1)] = true;
    counts.counts[static_cast<std::size_t>(score - 1)] = static_cast<std::int64_t>(*count);
  }
  counts.validate();
  return counts;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset, const RunInfo& info) {
  write_info_header(out, info);
  out << "id,unbiased_score,score";
  for (const auto& name : dataset.feature_names) out << ',' << name;
  out << '\n';
  for (const auto& r : dataset.records) {
    out << r.id << ',';
    if (r.unbiased_score) out << r.unbiased_score->value();
    out << ',' << r.biased_score.value();
    if (r.features) {
      for (Eigen::Index f = 0; f < r.features->size(); ++f) {
        out << ',' << format_double((*r.features)(f));
      }
    }
    out << '\n';
  }
}

void write_curve_csv(std::ostream& out, const bounds::BoundCurve& curve,
                     const RunInfo& info) {
  write_info_header(out, info);
  const int k = curve.scheme.bin_count();
  out << "v,accuracy_upper,precision_upper,lower_majority,lower_prior_matched";
  for (int j = 0; j < k; ++j) out << ",share_bin" << j;
  out << ",nps_unbiased,nps_biased,nps_balanced";
  for (int j = 0; j < k; ++j) out << ",share_total_bin" << j;
  const bool mc = curve.method == bounds::Method::kMonteCarlo;
  if (mc) {
    out << ",accuracy_upper_std,precision_upper_std,lower_majority_std,"
           "lower_prior_matched_std,nps_unbiased_std,nps_biased_std,nps_balanced_std";
  }
  out << '\n';
  for (const auto& p : curve.points) {
    out << p.v << ',' << format_double(p.accuracy_upper) << ','
        << format_double(p.precision_upper) << ',' << format_double(p.lower_majority)
        << ',' << format_double(p.lower_prior_matched);
    for (int j = 0; j < k; ++j) out << ',' << format_double(p.class_shares(j));
    out << ',' << format_double(p.nps_unbiased) << ',' << format_double(p.nps_biased)
        << ',' << format_double(p.nps_balanced);
    for (int j = 0; j < k; ++j) out << ',' << format_double(p.class_shares_total(j));
    if (mc) {
      const auto& s = *p.std;
      out << ',' << format_double(s.accuracy_upper) << ','
          << format_double(s.precision_upper) << ',' << format_double(s.lower_majority)
          << ',' << format_double(s.lower_prior_matched) << ','
          << format_double(s.nps_unbiased) << ',' << format_double(s.nps_biased) << ','
          << format_double(s.nps_balanced);
    }
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const bindesign::DesignSweep& sweep,
                     const RunInfo& info) {
  write_info_header(out, info);
  out << "scheme,group,v,accuracy\n";
  for (std::size_t i = 0; i < sweep.schemes.size(); ++i) {
    const std::string name = sweep.schemes[i].spec_string();
    for (int v = 0; v <= sweep.v_max; ++v) {
      out << name << ',' << sweep.groups[i] << ',' << v << ','
          << format_double(sweep.accuracy[i][static_cast<std::size_t>(v)]) << '\n';
    }
  }
}

void write_rmse_csv(std::ostream& out, const calibrate::RmseCurve& curve,
                    const RunInfo& info) {
  write_info_header(out, info);
  out << "v,rmse\n";
  for (int v = 0; v <= curve.v_max(); ++v) {
    out << v << ',' << format_double(curve.rmse_at(v)) << '\n';
  }
}

json make_report(const json& config, const json& results,
                 const std::vector<std::string>& warnings) {
  return json{{"tool", "surveysim"},
              {"version", kVersion},
              {"config", config},
              {"results", results},
              {"warnings", warnings}};
}

namespace {

json json_number(double value) {
  if (!std::isfinite(value)) return json(format_double(value));  // "inf"/"nan" as text
  // round-trip through the declared precision so reports and CSVs agree
  return json(std::stod(format_double(value)));
}

}  // namespace

json to_json(const bounds::BoundCurve& curve) {
  json points = json::array();
  for (const auto& p : curve.points) {
    json shares = json::array();
    json shares_total = json::array();
    for (Eigen::Index j = 0; j < p.class_shares.size(); ++j) {
      shares.push_back(json_number(p.class_shares(j)));
      shares_total.push_back(json_number(p.class_shares_total(j)));
    }
    json point{{"v", p.v},
               {"accuracy_upper", json_number(p.accuracy_upper)},
               {"precision_upper", json_number(p.precision_upper)},
               {"lower_majority", json_number(p.lower_majority)},
               {"lower_prior_matched", json_number(p.lower_prior_matched)},
               {"class_shares", shares},
               {"class_shares_total", shares_total},
               {"nps_unbiased", json_number(p.nps_unbiased)},
               {"nps_biased", json_number(p.nps_biased)},
               {"nps_balanced", json_number(p.nps_balanced)}};
    if (p.std) {
      json shares_std = json::array();
      for (Eigen::Index j = 0; j < p.std->class_shares.size(); ++j) {
        shares_std.push_back(json_number(p.std->class_shares(j)));
      }
      point["std"] = json{{"accuracy_upper", json_number(p.std->accuracy_upper)},
                          {"precision_upper", json_number(p.std->precision_upper)},
                          {"lower_majority", json_number(p.std->lower_majority)},
                          {"lower_prior_matched", json_number(p.std->lower_prior_matched)},
                          {"class_shares", shares_std},
                          {"nps_unbiased", json_number(p.std->nps_unbiased)},
                          {"nps_biased", json_number(p.std->nps_biased)},
                          {"nps_balanced", json_number(p.std->nps_balanced)}};
    }
    points.push_back(std::move(point));
  }
  json labels = json::array();
  for (const auto& l : curve.scheme.labels()) labels.push_back(l);
  return json{{"scheme", curve.scheme.spec_string()},
              {"labels", labels},
              {"method", curve.method == bounds::Method::kExact ? "exact" : "mc"},
              {"n", curve.n},
              {"points", points}};
}

json to_json(const stats::Chi2Result& result) {
  return json{{"variant", stats::to_string(result.variant)},
              {"statistic", json_number(result.statistic)},
              {"dof", result.dof},
              {"p_value", json_number(result.p_value)},
              {"warnings", result.warnings}};
}

json to_json(const stats::UniformityComparison& comparison) {
  json variants = json::array();
  for (const auto& cmp : comparison.variants) {
    variants.push_back(json{{"variant", stats::to_string(cmp.uncalibrated.variant)},
                            {"uncalibrated", to_json(cmp.uncalibrated)},
                            {"calibrated", to_json(cmp.calibrated)},
                            {"p_ratio", json_number(cmp.p_ratio)},
                            {"calibrated_more_uniform", cmp.calibrated_more_uniform}});
  }
  return json{{"variants", variants}};
}

json to_json(const stats::SpreadSummary& summary) {
  return json{{"mean", json_number(summary.mean)},
              {"two_sigma", json_number(summary.two_sigma)}};
}

json to_json(const stats::Crosstab& table) {
  json counts = json::array();
  for (int s = 0; s < table.counts.rows(); ++s) {
    json row = json::object();
    row["score"] = s + Score::kMin;
    for (int c = 0; c < table.counts.cols(); ++c) {
      row[table.labels[static_cast<std::size_t>(c)]] = table.counts(s, c);
    }
    const auto& modal = table.modal_by_score[static_cast<std::size_t>(s)];
    row["modal"] = modal.empty() ? json(nullptr) : json(modal);
    counts.push_back(std::move(row));
  }
  return json{{"labels", table.labels}, {"rows", counts}};
}

json to_json(const calibrate::EstimateReport& report) {
  json fit{{"rmse", json_number(report.full_fit.rmse)},
           {"intercept", json_number(report.full_fit.intercept)},
           {"n_rows", report.full_fit.n_rows},
           {"n_features", report.full_fit.n_features},
           {"rank", report.full_fit.rank},
           {"warnings", report.full_fit.warnings}};
  json coeffs = json::array();
  for (Eigen::Index i = 0; i < report.full_fit.coefficients.size(); ++i) {
    coeffs.push_back(json_number(report.full_fit.coefficients(i)));
  }
  fit["coefficients"] = coeffs;

  json out{{"balanced_rmse_mean", json_number(report.rmse.mean)},
           {"balanced_rmse_std", json_number(report.rmse.std)},
           {"iterations", report.rmse.iterations},
           {"v_hat", json_number(report.v_hat)},
           {"accuracy_ceiling", json_number(report.ceiling.accuracy_ceiling)},
           {"full_fit", fit},
           {"warnings", report.warnings}};
  if (report.ceiling.relative_score) {
    out["relative_score"] = json_number(*report.ceiling.relative_score);
  }
  if (!report.ceiling.warnings.empty()) out["ceiling_warnings"] = report.ceiling.warnings;
  return out;
}

}  // namespace survey::io
