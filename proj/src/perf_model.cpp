#include "wfsim/perf_model.hpp"

#include <algorithm>
#include <cmath>

#include "wfsim/errors.hpp"

namespace wfsim {

double predict_duration(const PerfModel& model, double size_mb) {
  return std::max(model.alpha * size_mb + model.beta, model.floor_s);
}

double sample_duration(const PerfModel& model, double size_mb, Rng& rng) {
  double median = predict_duration(model, size_mb);
  if (model.noise_sigma == 0.0) return median;
  std::normal_distribution<double> z(0.0, 1.0);
  return std::max(median * std::exp(model.noise_sigma * z(rng)), model.floor_s);
}

void check_positive_over(const PerfModel& model, double min_mb, double max_mb) {
  double lo = std::min(model.alpha * min_mb, model.alpha * max_mb) + model.beta;
  if (lo < model.floor_s)
    throw ConfigError("model predicts durations below floor_s inside the size range");
}

ModelTable::ModelTable(std::vector<ProfileRow> rows, double noise_sigma, double floor_s)
    : rows_(std::move(rows)), noise_sigma_(noise_sigma), floor_s_(floor_s) {
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be non-negative");
  if (!(floor_s > 0.0)) throw ConfigError("floor_s must be positive");
}

PerfModel ModelTable::lookup(Design design, UseCase use_case, Stage stage) const {
  auto it = std::find_if(rows_.begin(), rows_.end(), [&](const ProfileRow& r) {
    return r.design == design && r.use_case == use_case && r.stage == stage;
  });
  if (it == rows_.end())
    throw ConfigError("no model row for design " + std::string(to_string(design)) + " " +
                      std::string(to_string(use_case)) + "/" + std::string(to_string(stage)));
  return PerfModel{it->alpha, it->beta, noise_sigma_, floor_s_};
}

PerfModel ModelTable::lookup(Design design, const std::string& perf_model_id) const {
  auto slash = perf_model_id.find('/');
  if (slash == std::string::npos) throw ConfigError("malformed perf_model_id: " + perf_model_id);
  return lookup(design, parse_use_case(perf_model_id.substr(0, slash)),
                parse_stage(perf_model_id.substr(slash + 1)));
}

void ModelTable::set(const ProfileRow& row) {
  for (auto& r : rows_) {
    if (r.design == row.design && r.use_case == row.use_case && r.stage == row.stage) {
      r = row;
      return;
    }
  }
  rows_.push_back(row);
}

std::vector<ProfileRow> published_profile_rows() {
  using enum Design;
  using enum UseCase;
  using enum Stage;
  return {
      {D1, UC1, T1, 1.92e-2, 60.49},  {D1, UC1, T2, 5.21e-2, 128.53},
      {D1, UC2, T1, 0.93, 2.45},      {D1, UC2, T2, 5.21e-2, 128.53},
      {D2, UC1, T1, 3.17e-2, 64.81},  {D2, UC1, T2, 4.71e-2, 95.83},
      {D2, UC2, T1, 0.62, 1.52},      {D2, UC2, T2, 3.16e-2, 0.29},
      {D2A, UC1, T1, 2.74e-2, 49.03}, {D2A, UC1, T2, 4.80e-2, 87.60},
      {D2A, UC2, T1, 0.54, 1.51},     {D2A, UC2, T2, 2.82e-2, 0.26},
  };
}

std::vector<ProfileRow> fitted_profile_rows() {
  auto rows = published_profile_rows();
  rows[3].alpha = rows[7].alpha;
  rows[3].beta = rows[7].beta;
  return rows;
}

ModelTable default_model_table(double noise_sigma) {
  return ModelTable(fitted_profile_rows(), noise_sigma);
}

void to_json(nlohmann::json& j, const ProfileRow& row) {
  j = {{"design", to_string(row.design)},
       {"use_case", to_string(row.use_case)},
       {"stage", to_string(row.stage)},
       {"alpha", row.alpha},
       {"beta", row.beta}};
}

void from_json(const nlohmann::json& j, ProfileRow& row) {
  row.design = parse_design(j.at("design").get<std::string>());
  row.use_case = parse_use_case(j.at("use_case").get<std::string>());
  row.stage = parse_stage(j.at("stage").get<std::string>());
  row.alpha = j.at("alpha").get<double>();
  row.beta = j.at("beta").get<double>();
}

}  // namespace wfsim
