#pragma once

// Abstract interpreter: structural execution over AbstractEnv, loop
// fixpoints with widening strategies, and the checking pass that collects
// alarms.

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "miniastree/frontend.hpp"
#include "miniastree/memory.hpp"
#include "miniastree/packing.hpp"

namespace miniastree {

struct AnalysisOptions {
  double thresh_alpha = 1.0;
  double thresh_lambda = 2.0;
  int thresh_count = 60;
  int unroll = 1;
  int delay = 2;
  bool delay_exception = true;
  double epsilon = 1e-10;
  int narrowing_steps = 2;
  int max_iterations = 1000;
  std::set<std::string> partition_fns;
  int partition_cap = 64;
  int64_t max_ticks = 1000000;
  int shrink_above = 64;
  int tree_bool_cap = 3;
  bool octagons = true;
  bool ellipsoids = true;
  bool trees = true;
  bool clock = true;
  bool linearize = true;  // off: plain bottom-up interval evaluation
  bool record_invariants = true;

  ThresholdSet thresholds() const { return ThresholdSet::geometric(thresh_alpha, thresh_lambda, thresh_count); }
};

struct Alarm {
  ProgramPoint pt;
  AlarmKind kind = AlarmKind::Overflow;
  std::string expr;
  std::string witness;
};

class AnalysisDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalysisStats {
  int loop_iterations = 0;
  int octagon_packs = 0;
  int ellipsoid_packs = 0;
  int tree_packs = 0;
  double mean_octagon_size = 0;
};

struct PackView {
  PackKind kind;
  std::string id;
  std::vector<int> cells;  // tree packs: bools then nums
  int bools = 0;
};

struct AnalysisResult {
  std::vector<Alarm> alarms;  // sorted by program point
  // Environment before each statement (by point id), joined over contexts.
  std::map<int, AbstractEnv> invariants;
  AbstractEnv final_env;  // at the end of the entry function
  std::set<std::string> useful_packs;
  std::vector<std::string> warnings;
  AnalysisStats stats;
  Layout layout;
  std::vector<PackView> octagon_packs, ellipsoid_packs, tree_packs;

  // Value of a variable's first cell at the end of the entry function.
  Value final_value(const Program& p, const std::string& qual) const;
  // Value of a cell before the statement at point `pt_id` (bottom if the
  // point was never reached).
  Value value_at(int pt_id, int cell) const;
};

// Runs packing and the analysis. Throws AnalysisDiverged when a loop does
// not stabilize within the iteration budget.
AnalysisResult analyze(const Program& p, const AnalysisOptions& opt = {});
AnalysisResult analyze(const Program& p, const AnalysisOptions& opt, const PackingResult& packs);

// Cell of a qualified variable name (first cell of aggregates), or -1.
int find_cell(const Program& p, const Layout& l, const std::string& qual);

}  // namespace miniastree
