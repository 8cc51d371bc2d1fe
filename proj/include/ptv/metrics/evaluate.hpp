#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptv/metrics/metrics.hpp"
#include "ptv/tvae/infer.hpp"

namespace ptv::metrics {

struct FieldRecord {
  std::string site;
  std::string date;
  spectral::BandReflectance bands;
  ViewGeometry geometry;
  std::optional<double> lai_insitu;
  std::optional<double> ccc_insitu;
  std::optional<double> lai_uncertainty;
  std::string ccc_unit = "ug/cm2";  // "ug/cm2" or "mg/m2"
};

// CSV with header
//   site,date,b02,b03,b04,b05,b06,b07,b08,b08a,b11,b12,
//   sun_zen,view_zen,rel_az,lai,ccc,ccc_unit,lai_sd
// Empty numeric fields mean "missing". Records missing both truth values are
// rejected at load (at least one of lai/ccc is required).
std::vector<FieldRecord> load_field_records(const std::filesystem::path& path);

struct MetricsReport {
  struct Row {
    std::string group;
    std::string variable;
    std::string metric;
    double value = 0.0;
    int n = 0;
  };
  std::vector<Row> rows;
  int skipped = 0;

  std::string to_csv() const;  // long format: group,variable,metric,value,n
};

struct ScatterPoint {
  std::string site, date, variable;
  double truth = 0.0, pred = 0.0, lower = 0.0, upper = 0.0;
};

struct EvaluationOutput {
  MetricsReport report;
  std::vector<ScatterPoint> scatter;

  std::string scatter_csv() const;
};

// Per-record inversion + CCC posterior, grouped by site and overall.
// Predicted CCC is converted to each record's declared in-situ unit.
EvaluationOutput evaluate(const tvae::TrainedModel& model,
                          std::span<const FieldRecord> records,
                          int ccc_samples, std::uint64_t seed);

}  // namespace ptv::metrics
