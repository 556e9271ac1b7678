#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hbarsim/result.hpp"

namespace hbarsim::cli {

// A fully specified run: command id, numeric parameters, options. This is
// what the config file mirrors; command-line flags override config-file
// values, which override defaults.
struct RunConfig {
  std::string command;  // dotted id, e.g. "bound.cavity"
  std::map<std::string, double> parameters;
  std::map<std::string, std::vector<double>> grids;  // sweep commands only
  std::string mode = "exact";        // oscillator moment mode: exact|half-rate
  std::string convention = "2pi-nu";  // interferometer omega: 2pi-nu|nu
  std::string sampling = "leading";   // photon arrival: leading|exact-sqrt
  bool natural_units = false;
  std::uint64_t seed = 12345;
  std::string output_path;  // empty writes to stdout
  OutputFormat format = OutputFormat::json;
};

// Built-in default seed, after the HBARSIM_SEED environment override.
std::uint64_t default_seed();

// Validates and dispatches; throws ValidationError / NumericalError.
ResultTable execute(const RunConfig& config);

// execute + write artifact. Exit status: 0 ok, 2 validation error,
// 3 numerical/runtime failure.
int run(const RunConfig& config);

// Full command-line front end (argument parsing, config merge, dispatch).
int main_entry(int argc, const char* const* argv);

}  // namespace hbarsim::cli
