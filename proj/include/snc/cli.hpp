#pragma once

#include "snc/sim.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace snc {

/// Bad configuration or usage; reported with exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written; exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

struct SweepSpec {
  SweepAxis axis;
  std::vector<SchemeFamily> schemes;
};

/// Parsed `simulate` configuration.
struct RunConfig {
  SimConfig sim;
  std::optional<SweepSpec> sweep;
  std::string output_path;     ///< empty: stdout
  std::string histogram_path;  ///< empty: no histogram
  std::string trace_path;
  int verbosity = 0;
  bool threads_set = false;    ///< `threads` given in the file
};

/// Parses YAML text. `origin` prefixes diagnostics ("file:line: field: ...").
/// Each override is "dotted.key=value" with a YAML scalar or flow value.
RunConfig parse_run_config(const std::string& text, const std::string& origin,
                           const std::vector<std::string>& overrides = {});
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Design from YAML text: a catalog name, a map with K, D, q, C, a map
/// with a `design` key, or a run configuration with an SNC scheme.
SncDesign parse_design(const std::string& yaml_text, const std::string& origin);
/// YAML map form of a design that parse_design reads back.
std::string design_to_yaml(const SncDesign& design);

/// Grid syntax shared by the CLI: "a,b,c", "lin:from:to:count",
/// "log:from:to:count" or a single number. Empty text is an empty grid.
std::vector<double> parse_grid(std::string_view text, std::string_view field);

// CSV helpers
std::string csv_quote(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);
/// %.12g formatting.
std::string format_number(double value);

/// Entry point behind the snclab binary. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace snc
