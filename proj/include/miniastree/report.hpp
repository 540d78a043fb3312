#pragma once

// Configuration files, alarm reports and invariant dumps.

#include <stdexcept>
#include <string>

#include "miniastree/analyzer.hpp"
#include "miniastree/frontend.hpp"

namespace miniastree {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat `key = value` lines; `#` starts a comment. Keys are the long CLI
// flag names without dashes (thresh-alpha, delay, no-octagon, ...).
void apply_config_text(const std::string& text, AnalysisOptions& opt, const std::string& origin = "<config>");
void apply_config_file(const std::string& path, AnalysisOptions& opt);
// One setting; throws ConfigError on an unknown key or a bad value.
void apply_setting(const std::string& key, const std::string& value, AnalysisOptions& opt);
void validate(const AnalysisOptions& opt);

struct RunInfo {
  double elapsed_ms = 0;
  long peak_rss_kb = 0;
};

inline constexpr int kReportSchemaVersion = 1;

// `file:line:col: KIND: expr (witness)` per alarm, then `N alarms`.
std::string report_text(const Program& p, const AnalysisResult& r);
// Without timing unless `info` is given.
std::string report_json(const Program& p, const AnalysisResult& r, const RunInfo* info = nullptr);
// Every recorded invariant in program order: intervals, clock offsets and
// the relational constraints of each pack.
std::string dump_invariants(const Program& p, const AnalysisResult& r);

}  // namespace miniastree
