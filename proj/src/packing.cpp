#include "miniastree/packing.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>

namespace miniastree {

const char* pack_kind_name(PackKind k) {
  switch (k) {
    case PackKind::Octagon: return "oct";
    case PackKind::Tree: return "tree";
    case PackKind::Filter: return "ell";
  }
  return "?";
}

double PackingResult::mean_octagon_size() const {
  if (octagons.empty()) return 0;
  double s = 0;
  for (const auto& p : octagons) s += static_cast<double>(p.vars.size());
  return s / static_cast<double>(octagons.size());
}

std::string pack_id(PackKind kind, const Program& p, const std::vector<int>& vars) {
  std::vector<std::string> names;
  for (int v : vars) names.push_back(p.vars[v].qual);
  std::sort(names.begin(), names.end());
  std::string key = pack_kind_name(kind);
  key += ":";
  for (size_t i = 0; i < names.size(); ++i) key += (i ? "," : "") + names[i];
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

namespace {

bool is_scalar_var(const Program& p, int v) {
  const VarDecl& d = p.vars[v];
  return d.ty.kind == TypeDesc::Scalar && !d.is_volatile && !d.pruned;
}

bool is_numeric_var(const Program& p, int v) {
  return is_scalar_var(p, v) && p.vars[v].ty.scalar != ScalarType::Bool;
}

bool is_bool_var(const Program& p, int v) { return is_scalar_var(p, v) && p.vars[v].ty.scalar == ScalarType::Bool; }

// Collects the pack variables of a linear expression; false if non-linear.
bool linear_vars(const Program& p, const ExprPtr& e, std::set<int>& out) {
  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::FloatLit: return true;
    case ExprKind::BoolLit: return false;
    case ExprKind::Var:
      if (e->type == ScalarType::Bool) return false;
      if (is_numeric_var(p, e->var)) out.insert(e->var);
      return true;
    case ExprKind::Field:
    case ExprKind::Index: return e->type != ScalarType::Bool;
    case ExprKind::Unary: return e->uop == UnOp::Neg && linear_vars(p, e->a, out);
    case ExprKind::Cast: return e->type == ScalarType::Float && e->a->type == ScalarType::Int && linear_vars(p, e->a, out);
    case ExprKind::Binary: {
      std::set<int> a, b;
      switch (e->bop) {
        case BinOp::Add:
        case BinOp::Sub:
          if (!linear_vars(p, e->a, a) || !linear_vars(p, e->b, b)) return false;
          break;
        case BinOp::Mul:
          if (!linear_vars(p, e->a, a) || !linear_vars(p, e->b, b)) return false;
          if (!a.empty() && !b.empty()) return false;
          break;
        case BinOp::Div:
          if (e->type != ScalarType::Float) return false;
          if (!linear_vars(p, e->a, a) || !linear_vars(p, e->b, b) || !b.empty()) return false;
          break;
        default: return false;
      }
      out.insert(a.begin(), a.end());
      out.insert(b.begin(), b.end());
      return true;
    }
  }
  return false;
}

void atoms(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Unary && e->uop == UnOp::Not) return atoms(e->a, out);
  if (e->kind == ExprKind::Binary && (e->bop == BinOp::And || e->bop == BinOp::Or)) {
    atoms(e->a, out);
    atoms(e->b, out);
    return;
  }
  if (e->kind == ExprKind::Binary && is_comparison(e->bop)) out.push_back(e);
}

void all_vars(const ExprPtr& e, std::set<int>& out) {
  std::vector<int> v;
  collect_vars(e, v);
  out.insert(v.begin(), v.end());
}

void add_unique(std::vector<Pack>& packs, Pack pk) {
  for (const auto& q : packs)
    if (q.vars == pk.vars && q.bools == pk.bools && q.nums == pk.nums) return;
  packs.push_back(std::move(pk));
}

void octagon_block(const Program& p, const StmtPtr& s, std::vector<Pack>& out);

void octagon_children(const Program& p, const StmtPtr& s, std::vector<Pack>& out) {
  if (!s) return;
  if (s->kind == StmtKind::Block) return octagon_block(p, s, out);
  if (s->kind == StmtKind::If || s->kind == StmtKind::While) {
    octagon_children(p, s->then_s, out);
    octagon_children(p, s->else_s, out);
  }
}

void octagon_block(const Program& p, const StmtPtr& block, std::vector<Pack>& out) {
  std::set<int> vars;
  for (const auto& s : block->body) {
    if (s->kind == StmtKind::Assign && s->lhs->kind == ExprKind::Var && is_numeric_var(p, s->lhs->var)) {
      std::set<int> rv;
      if (linear_vars(p, s->expr, rv)) {
        vars.insert(s->lhs->var);
        vars.insert(rv.begin(), rv.end());
      }
    } else if (s->kind == StmtKind::If || s->kind == StmtKind::While) {
      std::vector<ExprPtr> as;
      atoms(s->expr, as);
      for (const auto& a : as) {
        if (a->a->type == ScalarType::Bool) continue;
        std::set<int> la, lb;
        if (linear_vars(p, a->a, la) && linear_vars(p, a->b, lb)) {
          vars.insert(la.begin(), la.end());
          vars.insert(lb.begin(), lb.end());
        }
      }
    }
  }
  if (vars.size() >= 2) {
    Pack pk;
    pk.kind = PackKind::Octagon;
    pk.vars.assign(vars.begin(), vars.end());
    pk.id = pack_id(PackKind::Octagon, p, pk.vars);
    add_unique(out, std::move(pk));
  }
  for (const auto& s : block->body) octagon_children(p, s, out);
}

struct TentativeTree {
  std::vector<int> bools;
  std::set<int> nums;
  bool confirmed = false;
};

class TreeInference {
 public:
  TreeInference(const Program& p, int cap) : p_(p), cap_(cap) {}

  void run() {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& f : p_.funs)
        if (!f.pruned) walk(f.body, {});
  }

  std::vector<Pack> result() const {
    std::vector<Pack> out;
    for (const auto& [seed, t] : packs_) {
      if (!t.confirmed || t.nums.empty()) continue;
      Pack pk;
      pk.kind = PackKind::Tree;
      pk.confirmed = true;
      pk.bools = t.bools;
      std::sort(pk.bools.begin(), pk.bools.end());
      pk.nums.assign(t.nums.begin(), t.nums.end());
      pk.vars = pk.bools;
      pk.vars.insert(pk.vars.end(), pk.nums.begin(), pk.nums.end());
      pk.id = pack_id(PackKind::Tree, p_, pk.vars);
      add_unique(out, std::move(pk));
    }
    return out;
  }

 private:
  const Program& p_;
  int cap_;
  std::map<int, TentativeTree> packs_;

  TentativeTree& pack_of(int b) {
    auto it = packs_.find(b);
    if (it == packs_.end()) {
      TentativeTree t;
      t.bools.push_back(b);
      it = packs_.emplace(b, std::move(t)).first;
    }
    return it->second;
  }

  void split(const std::set<int>& vars, std::set<int>& bools, std::set<int>& nums) const {
    for (int v : vars) {
      if (is_bool_var(p_, v)) bools.insert(v);
      if (is_numeric_var(p_, v)) nums.insert(v);
    }
  }

  // Numeric uses under a branch on a pack boolean confirm the pack.
  void uses(const std::set<int>& nums, const std::set<int>& ctrl) {
    for (auto& [seed, t] : packs_)
      for (int c : ctrl)
        if (std::find(t.bools.begin(), t.bools.end(), c) != t.bools.end())
          for (int n : nums)
            if (t.nums.count(n)) t.confirmed = true;
  }

  void walk(const StmtPtr& s, const std::set<int>& ctrl) {
    if (!s) return;
    switch (s->kind) {
      case StmtKind::Block:
        for (const auto& c : s->body) walk(c, ctrl);
        return;
      case StmtKind::If:
      case StmtKind::While: {
        std::set<int> cv, cb, cn;
        all_vars(s->expr, cv);
        split(cv, cb, cn);
        uses(cn, ctrl);
        std::set<int> inner = ctrl;
        inner.insert(cb.begin(), cb.end());
        walk(s->then_s, inner);
        walk(s->else_s, inner);
        return;
      }
      case StmtKind::Assign: {
        std::set<int> rv, rb, rn;
        all_vars(s->expr, rv);
        if (s->lhs->kind == ExprKind::Index) all_vars(s->lhs->a, rv);
        split(rv, rb, rn);
        uses(rn, ctrl);
        if (s->lhs->kind != ExprKind::Var) return;
        int x = s->lhs->var;
        if (is_numeric_var(p_, x)) {
          std::set<int> deps = ctrl;
          deps.insert(rb.begin(), rb.end());
          for (int b : deps) pack_of(b).nums.insert(x);
          // A numeric assigned from pack numerics under the pack's branch joins it.
          for (auto& [seed, t] : packs_)
            for (int c : ctrl)
              if (std::find(t.bools.begin(), t.bools.end(), c) != t.bools.end())
                for (int n : rn)
                  if (t.nums.count(n)) t.nums.insert(x);
        } else if (is_bool_var(p_, x)) {
          if (!rn.empty()) {
            auto& t = pack_of(x);
            t.nums.insert(rn.begin(), rn.end());
          }
          for (auto& [seed, t] : packs_) {
            bool touches = false;
            for (int v : rb)
              if (std::find(t.bools.begin(), t.bools.end(), v) != t.bools.end()) touches = true;
            for (int v : rn)
              if (t.nums.count(v)) touches = true;
            if (touches && std::find(t.bools.begin(), t.bools.end(), x) == t.bools.end() &&
                static_cast<int>(t.bools.size()) < cap_)
              t.bools.push_back(x);
          }
        }
        return;
      }
      case StmtKind::Call:
      case StmtKind::Return: {
        std::set<int> rv, rb, rn;
        for (const auto& a : s->args) all_vars(a, rv);
        all_vars(s->expr, rv);
        split(rv, rb, rn);
        uses(rn, ctrl);
        return;
      }
      case StmtKind::WaitTick: return;
    }
  }
};

std::optional<double> literal_value(const ExprPtr& e) {
  if (e->kind == ExprKind::FloatLit) return e->fval;
  if (e->kind == ExprKind::IntLit) return static_cast<double>(e->ival);
  if (e->kind == ExprKind::Cast && e->a->kind == ExprKind::IntLit) return static_cast<double>(e->a->ival);
  return std::nullopt;
}

// c*v or v*c with c literal.
std::optional<std::pair<double, int>> scaled_var(const ExprPtr& e) {
  if (e->kind != ExprKind::Binary || e->bop != BinOp::Mul) return std::nullopt;
  auto ca = literal_value(e->a);
  if (ca && e->b->kind == ExprKind::Var) return std::make_pair(*ca, e->b->var);
  auto cb = literal_value(e->b);
  if (cb && e->a->kind == ExprKind::Var) return std::make_pair(*cb, e->a->var);
  return std::nullopt;
}

bool assigns_var(const StmtPtr& s, int& lhs) {
  if (s->kind != StmtKind::Assign || s->lhs->kind != ExprKind::Var) return false;
  lhs = s->lhs->var;
  return true;
}

bool is_var(const ExprPtr& e, int v) { return e->kind == ExprKind::Var && e->var == v; }

std::optional<Pack> match_filter(const Program& p, const StmtPtr& reinit, const StmtPtr& update,
                                 std::vector<std::string>* warnings) {
  if (!reinit || !update || reinit->body.size() != 2 || update->body.size() != 3) return std::nullopt;
  int xp, y, x, r1, r2;
  const auto& u = update->body;
  if (!assigns_var(u[0], xp) || !assigns_var(u[1], y) || !assigns_var(u[2], x)) return std::nullopt;
  if (xp == x || xp == y || x == y) return std::nullopt;
  for (int v : {xp, x, y})
    if (!is_numeric_var(p, v) || p.vars[v].ty.scalar != ScalarType::Float) return std::nullopt;
  if (!is_var(u[1]->expr, x) || !is_var(u[2]->expr, xp)) return std::nullopt;
  if (!assigns_var(reinit->body[0], r1) || !assigns_var(reinit->body[1], r2)) return std::nullopt;
  if (!((r1 == y && r2 == x) || (r1 == x && r2 == y))) return std::nullopt;

  std::optional<double> a, b;
  bool negated = true;
  std::vector<std::pair<int, ExprPtr>> rest;
  for (auto& [sign, term] : additive_terms(u[0]->expr)) {
    auto sv = scaled_var(term);
    if (sv && sv->second == x && !a) {
      a = sign * sv->first;
      continue;
    }
    if (sv && sv->second == y && !b) {
      b = -sign * sv->first;
      negated = sign < 0;
      continue;
    }
    std::set<int> tv;
    all_vars(term, tv);
    if (tv.count(x) || tv.count(y) || tv.count(xp)) return std::nullopt;
    rest.emplace_back(sign, term);
  }
  if (!a || !b) return std::nullopt;
  Pack pk;
  pk.kind = PackKind::Filter;
  pk.vars = {x, xp, y};
  pk.params.a = *a;
  pk.params.b = *b;
  pk.update_stmt = u[0]->pt.id;
  pk.t_terms = std::move(rest);
  pk.b_written_negated = negated;
  pk.confirmed = true;
  if (!pk.params.valid()) {
    if (warnings) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s:%d:%d: filter with a=%g, b=%g ignored (needs 0<b<1 and a^2-4b<0)",
                    p.file_name(u[0]->pt).c_str(), u[0]->pt.line, u[0]->pt.col, *a, *b);
      warnings->push_back(buf);
    }
    return std::nullopt;
  }
  pk.id = pack_id(PackKind::Filter, p, pk.vars);
  return pk;
}

}  // namespace

std::vector<std::pair<int, ExprPtr>> additive_terms(const ExprPtr& e) {
  std::vector<std::pair<int, ExprPtr>> out;
  std::function<void(const ExprPtr&, int)> go = [&](const ExprPtr& x, int sign) {
    if (x->kind == ExprKind::Binary && (x->bop == BinOp::Add || x->bop == BinOp::Sub)) {
      go(x->a, sign);
      go(x->b, x->bop == BinOp::Add ? sign : -sign);
    } else if (x->kind == ExprKind::Unary && x->uop == UnOp::Neg) {
      go(x->a, -sign);
    } else {
      out.emplace_back(sign, x);
    }
  };
  go(e, 1);
  return out;
}

std::vector<Pack> infer_octagon_packs(const Program& p) {
  std::vector<Pack> out;
  for (const auto& f : p.funs)
    if (!f.pruned) octagon_block(p, f.body, out);
  return out;
}

std::vector<Pack> infer_tree_packs(const Program& p, int cap) {
  TreeInference t(p, cap);
  t.run();
  return t.result();
}

std::vector<Pack> detect_filter_patterns(const Program& p, std::vector<std::string>* warnings) {
  std::vector<Pack> out;
  std::function<void(const StmtPtr&)> walk = [&](const StmtPtr& s) {
    if (!s) return;
    for (const auto& c : s->body) walk(c);
    if (s->kind == StmtKind::If && s->else_s) {
      auto m = match_filter(p, s->then_s, s->else_s, warnings);
      if (!m) m = match_filter(p, s->else_s, s->then_s, warnings);
      if (m) add_unique(out, std::move(*m));
    }
    walk(s->then_s);
    walk(s->else_s);
  };
  for (const auto& f : p.funs)
    if (!f.pruned) walk(f.body);
  return out;
}

PackingResult infer_packs(const Program& p, const PackingOptions& opt) {
  PackingResult r;
  r.octagons = infer_octagon_packs(p);
  r.trees = infer_tree_packs(p, opt.tree_bool_cap);
  r.filters = detect_filter_patterns(p, &r.warnings);
  return r;
}

PackingResult filter_useful_packs(PackingResult r, const std::set<std::string>& useful, std::vector<std::string>* notes) {
  std::set<std::string> known;
  std::vector<Pack> kept;
  for (auto& pk : r.octagons) {
    known.insert(pk.id);
    if (useful.count(pk.id)) kept.push_back(std::move(pk));
  }
  r.octagons = std::move(kept);
  if (notes)
    for (const auto& id : useful)
      if (!known.count(id)) notes->push_back("unknown pack id " + id + " ignored");
  return r;
}

std::set<std::string> read_pack_ids(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read packs file " + path);
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    ids.insert(line.substr(b, e - b + 1));
  }
  return ids;
}

void write_pack_ids(const std::string& path, const std::set<std::string>& ids) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write packs file " + path);
  for (const auto& id : ids) out << id << "\n";
}

}  // namespace miniastree
