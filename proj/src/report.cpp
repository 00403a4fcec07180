#include "tdha/report.hpp"

#include <cstdio>
#include <sstream>

#include "tdha/error.hpp"

namespace tdha::report {

using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string value_text(const Row& row) {
  if (!row.value) return "";
  std::ostringstream os;
  os << *row.value;
  return os.str();
}

}  // namespace

Format parse_format(std::string_view text) {
  if (text == "json") return Format::json;
  if (text == "csv") return Format::csv;
  if (text == "md") return Format::markdown;
  throw InvalidInputError("unknown format '" + std::string(text) + "' (expected json, csv or md)");
}

json to_json(const harness::EvalReport& r) {
  const auto& o = r.options;
  json config = {
      {"alpha", o.fusion.alpha},
      {"epsilon", o.fusion.epsilon},
      {"tau", o.fusion.tau},
      {"scale", o.scale},
      {"shots", o.shots},
      {"episodes", o.episodes},
      {"seed", o.seed},
      {"components", o.fusion.components.names()},
      {"neg_mean", to_string(o.neg_mean)},
      {"metric", to_string(o.fusion.metric)},
      {"text_aggregation", to_string(o.text_aggregation)},
  };
  json results = json::array();
  for (const auto& s : r.results) {
    json episodes = json::array();
    for (const auto& e : s.episodes) {
      episodes.push_back({{"episode_index", e.episode_index},
                          {"prototype_seed", e.prototype_seed},
                          {"support_hash", hex64(e.support_hash)},
                          {"correct", e.correct},
                          {"total", e.total},
                          {"accuracy", e.accuracy}});
    }
    results.push_back({{"shots", s.shots}, {"mean", s.mean}, {"std", s.stddev},
                       {"episodes", std::move(episodes)}});
  }
  return {{"config", std::move(config)},
          {"results", std::move(results)},
          {"diagnostics", r.diagnostics},
          {"test_items", r.test_items},
          {"timing", {{"seconds_per_item", r.seconds_per_item}}}};
}

json to_json(const Document& doc) {
  json rows = json::array();
  for (const auto& row : doc.rows) {
    json j = {{"label", row.label}, {"report", to_json(*row.report)}};
    if (row.value) j["value"] = *row.value;
    rows.push_back(std::move(j));
  }
  json out = {{"command", doc.command},
              {"bundle", doc.bundle},
              {"test_bundle", doc.test_bundle.empty() ? json(nullptr) : json(doc.test_bundle)},
              {"rows", std::move(rows)}};
  if (!doc.parameter.empty()) out["parameter"] = doc.parameter;
  return out;
}

json to_json(const GeometryCheckReport& report) {
  json props = json::array();
  for (const auto& p : report.properties) {
    props.push_back({{"name", p.name},
                     {"passed", p.passed},
                     {"max_error", p.max_error},
                     {"tolerance", p.tolerance},
                     {"samples", p.samples},
                     {"timing", {{"seconds", p.seconds}}}});
  }
  return {{"command", "geom-check"}, {"passed", report.passed()}, {"properties", std::move(props)}};
}

std::string to_csv(const Document& doc) {
  std::ostringstream os;
  os << "label,value,shots,mean,std,episodes,accuracies\n";
  os.precision(17);
  for (const auto& row : doc.rows) {
    for (const auto& s : row.report->results) {
      os << '"' << row.label << "\"," << value_text(row) << ',' << s.shots << ',' << s.mean << ','
         << s.stddev << ',' << s.episodes.size() << ',';
      for (std::size_t i = 0; i < s.episodes.size(); ++i) {
        if (i) os << ';';
        os << s.episodes[i].accuracy;
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string to_markdown(const Document& doc) {
  // one column per shot count, taken from the first row
  std::vector<std::size_t> shots;
  if (!doc.rows.empty()) {
    for (const auto& s : doc.rows.front().report->results) shots.push_back(s.shots);
  }
  const bool has_value = !doc.rows.empty() && doc.rows.front().value.has_value();
  std::ostringstream os;
  os << "| " << (has_value ? doc.parameter : std::string("configuration")) << " |";
  for (auto n : shots) os << ' ' << n << "-shot |";
  os << "\n|---|";
  for (std::size_t i = 0; i < shots.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& row : doc.rows) {
    os << "| " << (has_value ? value_text(row) : row.label) << " |";
    for (const auto& s : row.report->results) {
      os << ' ' << fixed(100.0 * s.mean, 2) << " ± " << fixed(100.0 * s.stddev, 2) << " |";
    }
    os << '\n';
  }
  return os.str();
}

std::string to_markdown(const GeometryCheckReport& report) {
  std::ostringstream os;
  os << "| property | result | max error | tolerance | samples |\n|---|---|---|---|---|\n";
  for (const auto& p : report.properties) {
    os << "| " << p.name << " | " << (p.passed ? "PASS" : "FAIL") << " | " << p.max_error << " | "
       << p.tolerance << " | " << p.samples << " |\n";
  }
  return os.str();
}

std::string render(const Document& doc, Format format) {
  switch (format) {
    case Format::json: return to_json(doc).dump(2) + "\n";
    case Format::csv: return to_csv(doc);
    case Format::markdown: return to_markdown(doc);
  }
  return {};
}

json strip_timing(json j) {
  if (j.is_object()) {
    j.erase("timing");
    for (auto& [key, value] : j.items()) value = strip_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timing(value);
  }
  return j;
}

}  // namespace tdha::report
