#include "differential.hpp"

#include <set>
#include <utility>

#include "miniastree/concrete.hpp"

namespace differential {

using namespace miniastree;

namespace {

void note(Report& r, const std::string& m) {
  if (r.examples.size() < 10) r.examples.push_back(m);
}

}  // namespace

Report run(uint64_t seed, int programs, int runs_per_program, int64_t ticks, const AnalysisOptions& opt,
           const progen::GenOptions& gen) {
  Report rep;
  for (int i = 0; i < programs; ++i) {
    uint64_t ps = seed * 1000003u + static_cast<uint64_t>(i);
    std::string src = progen::generate(ps, gen);
    Program p;
    try {
      p = prune_unused_globals(const_fold(parse_source(src, "gen" + std::to_string(ps) + ".mc")));
    } catch (const std::exception& e) {
      ++rep.rejected;
      note(rep, std::string("program ") + std::to_string(ps) + " rejected: " + e.what());
      continue;
    }
    AnalysisResult res;
    try {
      res = analyze(p, opt);
    } catch (const AnalysisDiverged&) {
      ++rep.diverged;
      continue;
    }
    ++rep.programs;
    std::set<std::pair<int, AlarmKind>> alarms;
    for (const auto& a : res.alarms) alarms.insert({a.pt.id, a.kind});

    for (int k = 0; k < runs_per_program; ++k) {
      RunOptions ro;
      ro.seed = ps * 7919u + static_cast<uint64_t>(k);
      ro.max_ticks = ticks;
      ro.max_steps = 200000;
      bool bad = false;
      auto obs = [&](const Stmt& s, const ConcreteState& st) {
        ++rep.statements;
        if (bad) return;
        auto it = res.invariants.find(s.pt.id);
        std::string why;
        if (it == res.invariants.end()) {
          why = "no invariant";
        } else if (state_in(res.layout, it->second, st, &why)) {
          return;
        }
        bad = true;
        ++rep.violations;
        note(rep, "program " + std::to_string(ps) + " run " + std::to_string(k) + " line " +
                      std::to_string(s.pt.line) + ": " + why);
      };
      RunResult rr = run_concrete(p, ro, obs);
      ++rep.runs;
      if (rr.fault) {
        ++rep.faults;
        if (!alarms.count({rr.fault->pt.id, rr.fault->kind})) {
          ++rep.unmatched_faults;
          note(rep, "program " + std::to_string(ps) + " run " + std::to_string(k) + ": unreported " +
                        alarm_kind_name(rr.fault->kind) + " at line " + std::to_string(rr.fault->pt.line) +
                        ":" + std::to_string(rr.fault->pt.col));
        }
      }
    }
  }
  return rep;
}

}  // namespace differential
