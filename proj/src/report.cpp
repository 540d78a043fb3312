#include "miniastree/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace miniastree {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

int64_t to_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long long d = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

int small_int(const std::string& key, const std::string& v) {
  int64_t x = to_int(key, v);
  if (x < -1000000000 || x > 1000000000) throw ConfigError(key + ": value out of range");
  return static_cast<int>(x);
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string where(const Program& p, const ProgramPoint& pt) {
  return p.file_name(pt) + ":" + std::to_string(pt.line) + ":" + std::to_string(pt.col);
}

const char* stmt_label(StmtKind k) {
  switch (k) {
    case StmtKind::Assign: return "assign";
    case StmtKind::If: return "if";
    case StmtKind::While: return "while";
    case StmtKind::Block: return "block";
    case StmtKind::Call: return "call";
    case StmtKind::Return: return "return";
    case StmtKind::WaitTick: return "wait_tick";
  }
  return "?";
}

void collect(const StmtPtr& s, std::vector<const Stmt*>& out) {
  if (!s) return;
  if (s->kind != StmtKind::Block) out.push_back(s.get());
  for (const auto& c : s->body) collect(c, out);
  collect(s->then_s, out);
  collect(s->else_s, out);
}

std::vector<std::string> cell_names(const AnalysisResult& r, const std::vector<int>& cells) {
  std::vector<std::string> out;
  for (int c : cells) out.push_back(r.layout.cell(c).name);
  return out;
}

}  // namespace

void apply_setting(const std::string& key, const std::string& value, AnalysisOptions& o) {
  if (key == "thresh-alpha") o.thresh_alpha = to_double(key, value);
  else if (key == "thresh-lambda") o.thresh_lambda = to_double(key, value);
  else if (key == "thresh-count") o.thresh_count = small_int(key, value);
  else if (key == "unroll") o.unroll = small_int(key, value);
  else if (key == "delay") o.delay = small_int(key, value);
  else if (key == "delay-exception") o.delay_exception = to_bool(key, value);
  else if (key == "epsilon") o.epsilon = to_double(key, value);
  else if (key == "narrowing-steps") o.narrowing_steps = small_int(key, value);
  else if (key == "max-iterations") o.max_iterations = small_int(key, value);
  else if (key == "partition") {
    o.partition_fns.clear();
    std::stringstream ss(value);
    std::string fn;
    while (std::getline(ss, fn, ','))
      if (!trim(fn).empty()) o.partition_fns.insert(trim(fn));
  } else if (key == "partition-cap") o.partition_cap = small_int(key, value);
  else if (key == "max-ticks") o.max_ticks = to_int(key, value);
  else if (key == "shrink-above") o.shrink_above = small_int(key, value);
  else if (key == "tree-bool-cap") o.tree_bool_cap = small_int(key, value);
  else if (key == "no-octagon") o.octagons = !to_bool(key, value);
  else if (key == "no-ellipsoid") o.ellipsoids = !to_bool(key, value);
  else if (key == "no-trees") o.trees = !to_bool(key, value);
  else if (key == "no-clock") o.clock = !to_bool(key, value);
  else if (key == "no-linearize") o.linearize = !to_bool(key, value);
  else throw ConfigError("unknown setting '" + key + "'");
}

void apply_config_text(const std::string& text, AnalysisOptions& opt, const std::string& origin) {
  std::stringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(n) + ": expected key = value");
    try {
      apply_setting(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), opt);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

void apply_config_file(const std::string& path, AnalysisOptions& opt) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  apply_config_text(ss.str(), opt, path);
}

void validate(const AnalysisOptions& o) {
  auto need = [](bool ok, const std::string& m) {
    if (!ok) throw ConfigError(m);
  };
  need(o.thresh_alpha > 0, "thresh-alpha must be positive");
  need(o.thresh_lambda > 1, "thresh-lambda must exceed 1");
  need(o.thresh_count >= 0 && o.thresh_count <= 2000, "thresh-count must lie in [0, 2000]");
  need(o.unroll >= 0, "unroll must be non-negative");
  need(o.delay >= 0, "delay must be non-negative");
  need(o.epsilon >= 0, "epsilon must be non-negative");
  need(o.narrowing_steps >= 0, "narrowing-steps must be non-negative");
  need(o.max_iterations > 0, "max-iterations must be positive");
  need(o.partition_cap > 0, "partition-cap must be positive");
  need(o.max_ticks > 0, "max-ticks must be positive");
  need(o.shrink_above >= 0, "shrink-above must be non-negative");
  need(o.tree_bool_cap >= 1 && o.tree_bool_cap <= 16, "tree-bool-cap must lie in [1, 16]");
}

std::string report_text(const Program& p, const AnalysisResult& r) {
  std::ostringstream os;
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  for (const auto& a : r.alarms) {
    os << where(p, a.pt) << ": " << upper(alarm_kind_name(a.kind)) << ": " << a.expr;
    if (!a.witness.empty()) os << " (" << a.witness << ")";
    os << "\n";
  }
  os << r.alarms.size() << (r.alarms.size() == 1 ? " alarm" : " alarms") << "\n";
  return os.str();
}

std::string report_json(const Program& p, const AnalysisResult& r, const RunInfo* info) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  ordered_json files = ordered_json::array();
  for (const auto& f : p.files) files.push_back(f);
  j["files"] = files;
  ordered_json alarms = ordered_json::array();
  for (const auto& a : r.alarms) {
    alarms.push_back({{"file", p.file_name(a.pt)},
                      {"line", a.pt.line},
                      {"col", a.pt.col},
                      {"kind", alarm_kind_name(a.kind)},
                      {"expr", a.expr},
                      {"witness", a.witness}});
  }
  j["alarms"] = alarms;
  j["warnings"] = r.warnings;
  ordered_json stats;
  stats["loop_iterations"] = r.stats.loop_iterations;
  stats["octagon_packs"] = r.stats.octagon_packs;
  stats["mean_octagon_size"] = r.stats.mean_octagon_size;
  stats["ellipsoid_packs"] = r.stats.ellipsoid_packs;
  stats["tree_packs"] = r.stats.tree_packs;
  stats["useful_packs"] = std::vector<std::string>(r.useful_packs.begin(), r.useful_packs.end());
  stats["cells"] = r.layout.size();
  if (info) {
    stats["elapsed_ms"] = info->elapsed_ms;
    stats["peak_rss_kb"] = info->peak_rss_kb;
  }
  j["stats"] = stats;
  return j.dump(2) + "\n";
}

std::string dump_invariants(const Program& p, const AnalysisResult& r) {
  std::vector<const Stmt*> stmts;
  for (const auto& f : p.funs)
    if (!f.pruned) collect(f.body, stmts);
  std::stable_sort(stmts.begin(), stmts.end(), [](const Stmt* a, const Stmt* b) {
    return std::tie(a->pt.file, a->pt.line, a->pt.col) < std::tie(b->pt.file, b->pt.line, b->pt.col);
  });
  std::ostringstream os;
  for (const Stmt* s : stmts) {
    auto it = r.invariants.find(s->pt.id);
    os << where(p, s->pt) << " " << stmt_label(s->kind) << "\n";
    if (it == r.invariants.end() || it->second.bottom) {
      os << "  unreachable\n";
      continue;
    }
    const AbstractEnv& e = it->second;
    os << "  clock in " << e.clock.to_string() << "\n";
    for (const Cell& c : r.layout.cells()) {
      const CellValue& cv = e.cell(c.id);
      os << "  " << c.name << " in " << cv.v.to_string();
      if (cv.clocked) os << " clocked " << cv.clocked->to_string();
      os << "\n";
    }
    for (size_t k = 0; k < r.octagon_packs.size(); ++k)
      if (const Octagon* o = e.octagons.find(static_cast<int>(k)))
        for (const auto& line : o->constraints(cell_names(r, r.octagon_packs[k].cells)))
          os << "  oct " << r.octagon_packs[k].id << ": " << line << "\n";
    for (size_t k = 0; k < r.ellipsoid_packs.size(); ++k)
      if (const EllipsoidMap* m = e.ellipses.find(static_cast<int>(k)))
        for (const auto& line : m->constraints(cell_names(r, r.ellipsoid_packs[k].cells)))
          os << "  ell " << r.ellipsoid_packs[k].id << ": " << line << "\n";
    for (size_t k = 0; k < r.tree_packs.size(); ++k)
      if (const DecisionTree* t = e.trees.find(static_cast<int>(k))) {
        const PackView& pv = r.tree_packs[k];
        std::vector<int> bools(pv.cells.begin(), pv.cells.begin() + pv.bools);
        std::vector<int> nums(pv.cells.begin() + pv.bools, pv.cells.end());
        os << "  tree " << pv.id << ": " << t->to_string(cell_names(r, bools), cell_names(r, nums)) << "\n";
      }
  }
  return os.str();
}

}  // namespace miniastree
