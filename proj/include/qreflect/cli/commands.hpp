#pragma once

// Command dispatch: every command turns a RunConfig into a numeric table
// plus a metadata document.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qreflect/cli/config.hpp"
#include "qreflect/parallel.hpp"

namespace qreflect::cli {

enum class Command { Potential, Coeffs, Badlands, Reflect, SweepVelocity, GratingSweep, Pattern };

std::string_view to_string(Command command);
std::optional<Command> parse_command(std::string_view name);
const std::vector<Command>& all_commands();

struct Column {
  std::string name;
  std::string unit;
  std::string description;
};

const std::vector<Column>& columns(Command command);

/// Human-readable schema of the CSV a command writes.
std::string describe(Command command);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct RunOutput {
  Table table;
  nlohmann::json meta;  // resolved parameters, results, notes
  /// Rows whose computation hit a physics-domain error (NaN in the CSV).
  std::size_t failed_points = 0;
};

RunOutput execute(Command command, const RunConfig& config, Execution execution = Execution::Parallel);

}  // namespace qreflect::cli
