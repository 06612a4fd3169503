#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gltforge/json_io.hpp"

namespace gltforge {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

enum ExitCode : int { kExitOk = 0, kExitModuleError = 1, kExitConfigError = 2 };

/// Throws Error(Config) with a JSON pointer for the first invalid location.
void validate_experiment(const Json& config);

/// Validates, runs and writes the declared artifact (to `out` when no path is
/// configured). Diagnostics and summaries go to `log`.
int run_experiment(const Json& config, const Overrides& ov, std::ostream& out, std::ostream& log);

/// Reads a config file and runs it; parse failures are config errors.
int run_experiment_file(const std::string& path, const Overrides& ov, std::ostream& out, std::ostream& log);

/// RFC-4180 table: CRLF line ends, fields quoted when they contain a comma,
/// quote or line break.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

  static std::string field(double v);
  static std::string field(long v);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace gltforge
