#include "hbarsim/result.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hbarsim/errors.hpp"

namespace hbarsim {

OutputFormat parse_output_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ValidationError("unknown output format '" + name + "' (csv|json)");
}

std::string to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

void ResultTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw std::logic_error("result row width does not match columns");
  rows.push_back(std::move(row));
}

void ResultTable::stamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
  timestamp = buffer;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

nlohmann::json parameters_json(const ResultTable& table) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [key, value] : table.parameters) params[key] = value;
  return params;
}

}  // namespace

void write_csv(const ResultTable& table, std::ostream& out) {
  out << "# hbarsim " << table.tool_version << "\n";
  out << "# command: " << table.command << "\n";
  out << "# seed: " << table.seed << "\n";
  if (!table.mode.empty()) out << "# mode: " << table.mode << "\n";
  out << "# parameters: " << parameters_json(table).dump() << "\n";
  for (const auto& note : table.notes) out << "# note: " << note << "\n";
  out << "# timestamp: " << table.timestamp << "\n";

  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json meta;
  meta["version"] = table.tool_version;
  meta["command"] = table.command;
  meta["seed"] = table.seed;
  meta["parameters"] = parameters_json(table);
  if (!table.mode.empty()) meta["mode"] = table.mode;
  if (!table.notes.empty()) meta["notes"] = table.notes;
  meta["timestamp"] = table.timestamp;

  nlohmann::json doc;
  doc["meta"] = std::move(meta);
  doc["columns"] = table.columns;
  doc["rows"] = table.rows;
  return doc;
}

void write_json(const ResultTable& table, std::ostream& out) {
  out << to_json(table).dump(2) << "\n";
}

void write(const ResultTable& table, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::csv)
    write_csv(table, out);
  else
    write_json(table, out);
}

void validate_result_json(const nlohmann::json& doc) {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("result schema: ") + what);
  };
  require(doc.is_object(), "document must be an object");
  require(doc.contains("meta") && doc["meta"].is_object(), "missing meta object");
  const auto& meta = doc["meta"];
  require(meta.contains("version") && meta["version"].is_string(),
          "meta.version missing");
  require(meta.contains("command") && meta["command"].is_string(),
          "meta.command missing");
  require(meta.contains("seed") && meta["seed"].is_number_unsigned(),
          "meta.seed missing");
  require(meta.contains("parameters") && meta["parameters"].is_object(),
          "meta.parameters missing");
  for (const auto& [key, value] : meta["parameters"].items()) {
    (void)key;
    require(value.is_number(), "meta.parameters values must be numbers");
  }
  require(meta.contains("timestamp") && meta["timestamp"].is_string(),
          "meta.timestamp missing");
  require(doc.contains("columns") && doc["columns"].is_array(),
          "columns missing");
  require(doc.contains("rows") && doc["rows"].is_array(), "rows missing");
  const std::size_t width = doc["columns"].size();
  for (const auto& column : doc["columns"])
    require(column.is_string(), "columns must be strings");
  for (const auto& row : doc["rows"]) {
    require(row.is_array() && row.size() == width,
            "row width must match columns");
    for (const auto& cell : row) require(cell.is_number(), "cells must be numbers");
  }
}

}  // namespace hbarsim
