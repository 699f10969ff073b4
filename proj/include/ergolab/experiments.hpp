#pragma once

// Named desk-scale experiments with CSV output.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ergolab {

struct ExperimentConfig {
  std::string experiment;
  std::map<std::string, std::string> params;
};

struct ReportRow {
  std::string experiment;
  std::string params;
  std::uint64_t n = 0;  // 0 for rows that do not depend on N
  std::complex<double> estimate;
  std::complex<double> target;
  double defect = 0.0;  // |estimate - target|
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  bool accepted = true;
  std::vector<std::string> notes;  // failed acceptance checks and remarks
};

struct ExperimentKey {
  std::string name;
  std::string fallback;  // default value; empty means required
  std::string help;
};

struct ExperimentInfo {
  std::string name;
  std::string statement;  // the result being tested, in words
  std::vector<ExperimentKey> keys;
};

// Registry order is stable.
std::vector<ExperimentInfo> experiment_registry();
std::string list_experiments();

struct RunOptions {
  unsigned threads = 1;
  std::filesystem::path cache_dir;  // empty: no on-disk cache
};

// Throws InvalidArgument for unknown experiments or keys, ParseError for bad
// values and ResourceExhausted when a resource bound is hit.
ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// key=value lines, '#' comments, blank lines ignored.
std::map<std::string, std::string> parse_config_text(const std::string& text);
// Splits a "key=value" token.
std::pair<std::string, std::string> parse_assignment(const std::string& token);

inline constexpr const char* kCsvHeader = "experiment,params,N,estimate_re,estimate_im,target_re,target_im,defect";
void write_csv(std::ostream& out, const ExperimentReport& report);
ExperimentReport read_csv(std::istream& in);
std::string csv_field(const std::string& s);

}  // namespace ergolab
