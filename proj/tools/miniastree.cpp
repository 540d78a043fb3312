// miniastree analyze <file.mc>... [flags]
// miniastree run <file.mc> [--seed S] [--ticks N]
//
// Exit codes: 0 no alarms (run: no fault), 1 alarms (run: fault),
// 2 unreadable or invalid source, 3 bad configuration, 4 iteration budget
// exhausted.

#include <sys/resource.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "miniastree/analyzer.hpp"
#include "miniastree/concrete.hpp"
#include "miniastree/packing.hpp"
#include "miniastree/report.hpp"

using namespace miniastree;

namespace {

enum Exit { kClean = 0, kAlarms = 1, kSourceError = 2, kConfigError = 3, kDiverged = 4 };

struct SourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Program load(const std::vector<std::string>& paths) {
  std::vector<SourceFile> files;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw SourceError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    files.push_back({path, ss.str()});
  }
  return prune_unused_globals(const_fold(parse_program(files)));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

long peak_rss_kb() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return u.ru_maxrss;
}

std::string scalar_text(const Scalar& s) {
  std::ostringstream os;
  if (s.type == ScalarType::Float) {
    os.precision(17);
    os << s.f;
  } else if (s.type == ScalarType::Bool) {
    os << (s.i ? "true" : "false");
  } else {
    os << s.i;
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static analyzer for synchronous control programs"};
  app.require_subcommand(1);

  // analyze
  CLI::App* an = app.add_subcommand("analyze", "Analyze a program and report possible run-time errors");
  std::vector<std::string> files;
  an->add_option("files", files, "Source files, analyzed as one program")->required();
  std::string config_path, format = "text", dump_path, packs_in, packs_out;
  an->add_option("--config", config_path, "key = value settings, overridden by flags");
  an->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  an->add_option("--dump-invariants", dump_path, "Write every invariant to this file");
  an->add_option("--packs-file", packs_in, "Keep only the octagon packs listed in this file");
  an->add_option("--emit-useful-packs", packs_out, "Write the ids of useful octagon packs");

  // Numeric and boolean settings share their names with the config keys.
  std::map<std::string, std::string> given;
  auto setting = [&](const std::string& name, const std::string& help) {
    an->add_option_function<std::string>("--" + name, [&given, name](const std::string& v) { given[name] = v; },
                                         help);
  };
  setting("thresh-alpha", "Smallest positive widening threshold");
  setting("thresh-lambda", "Ratio between consecutive thresholds");
  setting("thresh-count", "Number of thresholds on each side");
  setting("unroll", "Loop iterations unrolled before the fixpoint");
  setting("delay", "Iterations using union before widening starts");
  setting("epsilon", "Relative perturbation of float bounds while iterating");
  setting("narrowing-steps", "Narrowing iterations after stabilization");
  setting("max-iterations", "Iteration budget per loop");
  setting("partition", "Comma-separated functions analyzed with trace partitioning");
  setting("partition-cap", "Most traces kept per partitioned function");
  setting("max-ticks", "Bound on the number of clock ticks of one execution");
  setting("shrink-above", "Arrays longer than this get a single cell");
  setting("tree-bool-cap", "Most booleans per decision tree pack");
  for (const char* off : {"no-octagon", "no-ellipsoid", "no-trees", "no-clock", "no-linearize"})
    an->add_flag_callback(std::string("--") + off, [&given, off] { given[off] = "true"; },
                          std::string("Disable ") + (off + 3));
  an->add_flag_callback("--no-delay-exception", [&given] { given["delay-exception"] = "false"; },
                        "Widen even when a variable just became stable");

  // run
  CLI::App* rn = app.add_subcommand("run", "Execute a program with random inputs");
  std::vector<std::string> run_files;
  uint64_t seed = 1;
  int64_t ticks = 1000;
  int64_t max_steps = 100000000;
  rn->add_option("files", run_files, "Source files")->required();
  rn->add_option("--seed", seed, "Input generator seed");
  rn->add_option("--ticks", ticks, "Stop after this many clock ticks")->check(CLI::PositiveNumber);
  rn->add_option("--max-steps", max_steps, "Stop after this many statements")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  if (rn->parsed()) {
    Program p;
    try {
      p = load(run_files);
    } catch (const std::exception& e) {
      std::cerr << e.what() << "\n";
      return kSourceError;
    }
    RunOptions ro;
    ro.seed = seed;
    ro.max_ticks = ticks;
    ro.max_steps = max_steps;
    RunResult r = run_concrete(p, ro);
    for (int g : p.globals) {
      const VarDecl& d = p.vars[g];
      if (d.pruned || d.is_volatile) continue;
      const auto& vals = r.final_state.vars[g];
      std::cout << d.qual << " =";
      for (const auto& s : vals) std::cout << " " << scalar_text(s);
      std::cout << "\n";
    }
    if (r.fault) {
      std::cout << p.file_name(r.fault->pt) << ":" << r.fault->pt.line << ":" << r.fault->pt.col
                << ": fault: " << alarm_kind_name(r.fault->kind) << " after " << r.ticks << " ticks\n";
      return kAlarms;
    }
    std::cout << (r.out_of_steps ? "step budget reached after " : "completed ") << r.ticks << " ticks, " << r.steps
              << " statements\n";
    return kClean;
  }

  auto t0 = std::chrono::steady_clock::now();
  AnalysisOptions opt;
  try {
    if (!config_path.empty()) apply_config_file(config_path, opt);
    for (const auto& [k, v] : given) apply_setting(k, v, opt);
    validate(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  Program p;
  try {
    p = load(files);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kSourceError;
  }

  AnalysisResult r;
  try {
    PackingOptions po;
    po.tree_bool_cap = opt.tree_bool_cap;
    PackingResult packs = infer_packs(p, po);
    if (!packs_in.empty()) {
      std::vector<std::string> notes;
      packs = filter_useful_packs(packs, read_pack_ids(packs_in), &notes);
      for (const auto& n : notes) std::cerr << "note: " << n << "\n";
    }
    r = analyze(p, opt, packs);
    if (!packs_out.empty()) write_pack_ids(packs_out, r.useful_packs);
    if (!dump_path.empty()) write_file(dump_path, dump_invariants(p, r));
  } catch (const AnalysisDiverged& e) {
    std::cerr << e.what() << "\n";
    return kDiverged;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }

  RunInfo info;
  info.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  info.peak_rss_kb = peak_rss_kb();
  std::cout << (format == "json" ? report_json(p, r, &info) : report_text(p, r));
  return r.alarms.empty() ? kClean : kAlarms;
}
