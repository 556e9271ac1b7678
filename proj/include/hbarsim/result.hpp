#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace hbarsim {

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& name);
std::string to_string(OutputFormat format);

// One command's result: a fixed-order column set, numeric rows, and the
// provenance needed to reproduce the run. `timestamp` is the only
// non-deterministic field.
struct ResultTable {
  std::string command;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::map<std::string, double> parameters;
  std::string mode;  // optional (moment mode, convention, ...)
  std::vector<std::string> notes;
  std::string timestamp;  // ISO 8601 UTC, set by stamp()

  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  void stamp();  // fills timestamp from the wall clock
};

// 17 significant digits: parses back to the identical double.
std::string format_double(double value);

void write_csv(const ResultTable& table, std::ostream& out);
void write_json(const ResultTable& table, std::ostream& out);
void write(const ResultTable& table, OutputFormat format, std::ostream& out);

nlohmann::json to_json(const ResultTable& table);

// Schema check for a written JSON result (round-trip validation).
void validate_result_json(const nlohmann::json& doc);

}  // namespace hbarsim
