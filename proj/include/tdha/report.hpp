#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tdha/geometry_check.hpp"
#include "tdha/harness.hpp"

namespace tdha::report {

enum class Format { json, csv, markdown };

Format parse_format(std::string_view text);

/// One labelled evaluation in a report table (an ablation row, a sweep point,
/// a metric variant, or the single row of a plain eval).
struct Row {
  std::string label;
  std::optional<double> value;  // sweep value, when applicable
  const harness::EvalReport* report = nullptr;
};

struct Document {
  std::string command;
  std::string bundle;
  std::string test_bundle;  // empty when the test split comes from `bundle`
  std::string parameter;    // sweep parameter name, empty otherwise
  std::vector<Row> rows;
};

nlohmann::json to_json(const harness::EvalReport& report);
nlohmann::json to_json(const Document& doc);
nlohmann::json to_json(const GeometryCheckReport& report);

/// Columns: label,value,shots,mean,std,episodes,accuracies (';' separated).
std::string to_csv(const Document& doc);
std::string to_markdown(const Document& doc);
std::string to_markdown(const GeometryCheckReport& report);

std::string render(const Document& doc, Format format);

/// Copy of `j` with every "timing" member removed, recursively.
nlohmann::json strip_timing(nlohmann::json j);

}  // namespace tdha::report
