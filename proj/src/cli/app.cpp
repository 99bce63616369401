#include "qreflect/cli/app.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "qreflect/error.hpp"

#ifndef QREFLECT_VERSION
#define QREFLECT_VERSION "0.0.0"
#endif

namespace qreflect::cli {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_csv(Command command, const Table& table, const std::string& digest) {
  std::string s;
  s += "# qreflect " QREFLECT_VERSION "\n";
  s += "# command: " + std::string(to_string(command)) + "\n";
  s += "# config-digest: fnv1a64:" + digest + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) s += (i ? "," : "") + table.columns[i];
  s += "\n";
  char buf[64];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g", row[i]);
      if (i) s += ',';
      s += buf;
    }
    s += "\n";
  }
  return s;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  f << text;
  f.close();
  if (!f) throw Error(ErrorKind::InvalidArgument, "write failed for " + path.string());
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix) {
  return std::filesystem::path(p.string() + suffix);
}

}  // namespace

void write_outputs(const std::filesystem::path& out, const std::string& csv, const std::string& meta) {
  const auto meta_path = with_suffix(out, ".meta.json");
  const auto csv_tmp = with_suffix(out, ".tmp");
  const auto meta_tmp = with_suffix(meta_path, ".tmp");
  std::error_code ec;
  try {
    write_file(csv_tmp, csv);
    write_file(meta_tmp, meta);
    std::filesystem::rename(csv_tmp, out);
    std::filesystem::rename(meta_tmp, meta_path);
  } catch (...) {
    for (const auto& p : {csv_tmp, meta_tmp, out, meta_path}) std::filesystem::remove(p, ec);
    throw;
  }
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto report = [&](std::string_view category, std::string_view kind, const std::string& msg, int code) {
    std::string line = msg;
    for (auto& ch : line)
      if (ch == '\n') ch = ' ';
    err << "error category=" << category << " kind=" << kind << ": " << line << "\n";
    return code;
  };

  CLI::App app{"Quantum reflection of matter waves from surface potentials", "qreflect"};
  std::string command_name, config_path, out_path;
  int jobs = 0;
  bool describe_only = false;
  std::vector<std::string> names;
  for (auto c : all_commands()) names.emplace_back(to_string(c));
  app.add_option("command", command_name, "one of: potential, coeffs, badlands, reflect, sweep-velocity, "
                                          "grating-sweep, pattern")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--config", config_path, "INI run configuration");
  app.add_option("--jobs", jobs, "worker threads for parallel kernels")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "CSV output path (default <command>.csv)");
  app.add_flag("--describe", describe_only, "print the CSV schema of the command and exit");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report("config", "ParseError", e.what(), kExitConfig);
  }

  const Command command = *parse_command(command_name);
  if (describe_only) {
    out << describe(command);
    return kExitOk;
  }
  if (config_path.empty()) return report("config", "ParseError", "--config is required", kExitConfig);
  if (out_path.empty()) out_path = std::string(to_string(command)) + ".csv";
  set_worker_count(jobs);

  try {
    const RunConfig config = load_config(config_path);
    RunOutput result = execute(command, config);
    if (!result.table.rows.empty() && result.failed_points == result.table.rows.size())
      throw Error(ErrorKind::NoReflectionPoint, "every point of the sweep failed; first: " +
                                                    result.meta["results"]["failures"][0]["error"].get<std::string>());
    const std::string digest = fnv1a_hex(result.meta["parameters"].dump());
    result.meta["tool"] = "qreflect";
    result.meta["version"] = QREFLECT_VERSION;
    result.meta["config_file"] = config_path;
    result.meta["config_digest"] = "fnv1a64:" + digest;
    write_outputs(out_path, format_csv(command, result.table, digest), result.meta.dump(2) + "\n");
    out << "wrote " << out_path << " (" << result.table.rows.size() << " rows";
    if (result.failed_points) out << ", " << result.failed_points << " failed";
    out << ")\n";
    return kExitOk;
  } catch (const Error& e) {
    const int code = e.category() == ErrorCategory::Config      ? kExitConfig
                     : e.category() == ErrorCategory::Physics   ? kExitPhysics
                                                                : kExitNumerical;
    return report(to_string(e.category()), to_string(e.kind()), e.what(), code);
  } catch (const std::exception& e) {
    return report("numerical", "Internal", e.what(), kExitNumerical);
  }
}

}  // namespace qreflect::cli
