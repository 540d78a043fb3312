#pragma once

// Random programs run concretely against their analysis.

#include <cstdint>
#include <string>
#include <vector>

#include "miniastree/analyzer.hpp"
#include "progen.hpp"

namespace differential {

struct Report {
  int programs = 0;
  int runs = 0;
  int faults = 0;
  int statements = 0;       // observed statement executions
  int violations = 0;       // state outside the invariant
  int unmatched_faults = 0; // fault without an alarm at the same point
  int rejected = 0;         // generator produced something the frontend refused
  int diverged = 0;
  std::vector<std::string> examples;
};

Report run(uint64_t seed, int programs, int runs_per_program, int64_t ticks,
           const miniastree::AnalysisOptions& opt = {}, const progen::GenOptions& gen = {});

}  // namespace differential
