#pragma once

#include <string>
#include <vector>

namespace ising {

// One output row of the command-line tool.
struct ResultRecord {
  std::string experiment;   // subcommand name
  std::string params;       // semicolon-separated key=value echo (no commas)
  std::string observable;   // what the value measures
  double value = 0.0;
  bool has_err = false;
  double err = 0.0;         // standard error or certified bound; see docs
  std::string provenance;   // exact | closed-form | mc | series | bound
  double seconds = 0.0;     // wall time, 0 unless timing was requested
};

inline constexpr const char* kCsvHeader =
    "experiment,params,observable,value,stderr,provenance,seconds";

std::string to_csv(const std::vector<ResultRecord>& rows);
std::string to_json(const std::vector<ResultRecord>& rows);

// Writes rows to `path` ("" means stdout) in the requested format.
// Rejects empty row sets: every command must produce at least one record.
void emit_results(const std::vector<ResultRecord>& rows, const std::string& format,
                  const std::string& path);

}  // namespace ising
