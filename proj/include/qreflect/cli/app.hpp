#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "qreflect/cli/commands.hpp"

namespace qreflect::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitPhysics = 4 };

/// CSV text: '#' header block (tool version, command, config digest),
/// column line, rows in %.12g.
std::string format_csv(Command command, const Table& table, const std::string& digest);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Writes <out> and <out>.meta.json through temporary files; nothing is
/// left behind if any step fails.
void write_outputs(const std::filesystem::path& out, const std::string& csv, const std::string& meta);

/// Whole program: args excludes argv[0]. Errors are reported on err as a
/// single line "error category=<c> kind=<k>: <message>".
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qreflect::cli
