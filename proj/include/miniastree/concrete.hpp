#pragma once

// Reference interpreter: doubles with round-to-nearest, checked 32-bit
// integers, seeded random volatile inputs.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "miniastree/frontend.hpp"
#include "miniastree/memory.hpp"
#include "miniastree/semantics.hpp"

namespace miniastree {

struct ConcreteState {
  // Per variable: the scalar, the elements, or the fields.
  std::vector<std::vector<Scalar>> vars;
  int64_t clock = 0;
};

struct RunOptions {
  uint64_t seed = 1;
  int64_t max_ticks = 1000000;
  int64_t max_steps = 10000000;  // statements executed
  // Probability that a volatile read returns a range endpoint.
  double boundary_bias = 0.2;
};

struct Fault {
  ProgramPoint pt;
  AlarmKind kind;
};

struct RunResult {
  std::optional<Fault> fault;
  int64_t ticks = 0;
  int64_t steps = 0;
  bool out_of_steps = false;
  ConcreteState final_state;
};

// Called before each statement starts.
using Observer = std::function<void(const Stmt&, const ConcreteState&)>;

RunResult run_concrete(const Program& p, const RunOptions& opt, const Observer& observe = {});

// Whether the state is described by env: every cell, the clock and the
// clocked offsets. `why` names the first escaping cell.
bool state_in(const Layout& l, const AbstractEnv& env, const ConcreteState& s, std::string* why = nullptr);

}  // namespace miniastree
