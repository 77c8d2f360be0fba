#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dogs/exact.hpp"
#include "dogs/gibbs.hpp"
#include "dogs/influence.hpp"
#include "dogs/model.hpp"
#include "dogs/optimizer.hpp"
#include "dogs/scan.hpp"
#include "dogs/variation.hpp"

namespace dogs {

using json = nlohmann::json;
using AnyModel = std::variant<BinaryPairwiseMrf, GeneralPairwiseMrf, HigherOrderBinaryMrf>;

const char* model_kind(const AnyModel& model) noexcept;
std::size_t model_size(const AnyModel& model) noexcept;

json model_to_json(const AnyModel& model);
AnyModel model_from_json(const json& j);

json influence_to_json(const InfluenceMatrix& bound);
InfluenceMatrix influence_from_json(const json& j);

/// Deterministic, systematic, uniform and explicit scans keep their kind;
/// mixed scans are written as explicit vectors.
json scan_to_json(const Scan& scan);
Scan scan_from_json(const json& j);

json weights_to_json(const WeightVector& d);
/// Accepts a JSON array, or the strings "ones" and "unit:<k>".
WeightVector weights_from_json(const json& j, std::size_t p);
WeightVector parse_weights(const std::string& text, std::size_t p);

json distribution_to_json(const ExactDistribution& dist);

json optimizer_report(const OptimizedScan& result, const OptimizerConfig& config);
json estimate_report(const Estimate& estimate, const Scan& scan, const StartSpec& start);

/// Throws ConfigError on unreadable or malformed files.
json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

/// Minimal CSV table; numbers are written with 17 significant digits.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  CsvTable& row();
  CsvTable& add(double value);
  CsvTable& add(std::size_t value);
  CsvTable& add(std::int64_t value);
  CsvTable& add(const std::string& value);

  std::size_t rows() const noexcept { return rows_.size(); }
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double value);

/// Columns t, changed_index, dv_running (t is one-based).
CsvTable trace_table(const CouplingBoundTrace& trace);
/// Columns replicate, seed, terminal_feature.
CsvTable sample_table(const Estimate& estimate);

}  // namespace dogs
