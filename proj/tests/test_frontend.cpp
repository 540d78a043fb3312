#include <cstring>
#include <functional>
#include <set>

#include "doctest.h"
#include "miniastree/frontend.hpp"

using namespace miniastree;

namespace {

const char* kRich = R"(
  enum mode { OFF, ON = 4, AUTO };
  volatile float in range [-1.5, 2.0];
  volatile int sel range [0, 3];
  volatile bool flag;
  int x;
  float y;
  bool b;
  int a[8];
  float big[100];
  struct { p: int; q: float; } r;
  enum mode m;

  float scale(float v, int k) {
    float t;
    t = v * k;
    return t / 2.0;
  }

  void step() {
    static int count;
    int i;
    i = 0;
    while (i < 8) { a[i] = i * 2; i = i + 1; }
    count = count + 1;
    if (count >= 10) count = 0;
  }

  void main() {
    while (true) {
      y = in;
      if (flag && !(sel == 2)) {
        y = scale(y, sel);
      } else if (x > -3) {
        x = (x << 1) >> 1;
      } else {
        x = (int)y % 5;
      }
      b = (x == 0) || b;
      r.p = m + AUTO;
      r.q = r.q - 0.2 * y;
      big[sel] = -y;
      step();
      wait_tick;
    }
  }
)";

std::string error_of(const std::string& src) {
  try {
    parse_source(src, "t.mc");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

const Stmt& main_stmt(const Program& p, size_t i) { return *p.funs[p.entry].body->body.at(i); }

}  // namespace

TEST_CASE("minimal program parses") {
  Program p = parse_source("int x; void main(){ x = 1; }");
  REQUIRE(p.globals.size() == 1);
  CHECK(p.vars[p.globals[0]].name == "x");
  REQUIRE(p.funs[p.entry].body->body.size() == 1);
  CHECK(main_stmt(p, 0).kind == StmtKind::Assign);
  CHECK(main_stmt(p, 0).expr->ival == 1);
}

TEST_CASE("recursion and unsupported constructs are rejected") {
  CHECK(error_of("int x; void main(){ main(); }").find("recursive") != std::string::npos);
  CHECK(error_of("int f(){ f(); return 1; } void main(){}").find("recursive") != std::string::npos);
  CHECK(error_of("int *p; void main(){}").find("pointers") != std::string::npos);
  CHECK(error_of("int x; void main(){ x = 1 }").find("t.mc:1:") == 0);
  CHECK(error_of("int x; void main(){ if (x) x = 1; }").find("bool") != std::string::npos);
  CHECK(error_of("int x; float y; void main(){ x = y; }").find("cannot convert") != std::string::npos);
  CHECK(error_of("int f(){ return 1; } bool c; void main(){ if (f() > 0) c = true; }")
            .find("only allowed as statements") != std::string::npos);
  CHECK(error_of("volatile float in range [0, 1]; void main(){ in = 0.5; }").find("volatile") != std::string::npos);
}

TEST_CASE("the octagon fragment parses into three statements") {
  Program p = parse_source(R"(
    float X; float Z; float V; float R; float L;
    void main() { R = X-Z; L = X; if (R>V) L = Z+V; }
  )");
  const auto& body = p.funs[p.entry].body->body;
  REQUIRE(body.size() == 3);
  CHECK(body[0]->kind == StmtKind::Assign);
  CHECK(body[1]->kind == StmtKind::Assign);
  CHECK(body[2]->kind == StmtKind::If);
  CHECK(body[2]->else_s == nullptr);
  CHECK(body[2]->then_s->body.size() == 1);
}

TEST_CASE("mixed arithmetic inserts promotions") {
  Program p = parse_source("int k; float y; void main(){ y = k + 1.5; y = k; }");
  const Stmt& s0 = main_stmt(p, 0);
  CHECK(s0.expr->type == ScalarType::Float);
  CHECK(s0.expr->a->kind == ExprKind::Cast);
  CHECK(main_stmt(p, 1).expr->kind == ExprKind::Cast);
}

TEST_CASE("constant folding") {
  Program p = const_fold(parse_source(R"(
    int x; int a[4]; float f; bool c;
    void main() { x = 2+3; a[1+1] = 0; f = 0.1+0.2; c = 1 < 2; x = 1/0; x = 2147483647 + 1; }
  )"));
  CHECK(main_stmt(p, 0).expr->kind == ExprKind::IntLit);
  CHECK(main_stmt(p, 0).expr->ival == 5);
  CHECK(main_stmt(p, 1).lhs->a->ival == 2);
  volatile double x = 0.1, y = 0.2;
  double expect = x + y;
  CHECK(main_stmt(p, 2).expr->fval == expect);
  CHECK(main_stmt(p, 2).expr->fval != 0.3);
  CHECK(main_stmt(p, 3).expr->kind == ExprKind::BoolLit);
  CHECK(main_stmt(p, 4).expr->kind == ExprKind::Binary);
  REQUIRE(p.fold_alarms.size() == 2);
  CHECK(p.fold_alarms[0].kind == AlarmKind::DivZero);
  CHECK(p.fold_alarms[1].kind == AlarmKind::Overflow);

  Program twice = const_fold(p);
  CHECK(same_ast(p, twice));
  CHECK(twice.fold_alarms.size() == 2);
}

TEST_CASE("unused globals are pruned after folding") {
  Program p = prune_unused_globals(const_fold(parse_source(R"(
    int used; int g; int dead_only;
    volatile float unread range [0, 1];
    void main() { used = 1; if (1 > 2) { used = dead_only; } }
  )")));
  CHECK(p.find_global("used") >= 0);
  CHECK(p.find_global("g") < 0);
  CHECK(p.find_global("dead_only") < 0);
  CHECK(p.find_global("unread") < 0);
  REQUIRE(p.pruned_volatiles.size() == 1);
  CHECK(p.pruned_volatiles[0] == "unread");

  std::vector<int> refs;
  std::function<void(const StmtPtr&)> walk = [&](const StmtPtr& s) {
    if (!s) return;
    collect_vars(s->lhs, refs);
    collect_vars(s->expr, refs);
    for (auto& st : s->body) walk(st);
    walk(s->then_s);
    walk(s->else_s);
  };
  for (const auto& f : p.funs)
    if (!f.pruned) walk(f.body);
  for (int v : refs) CHECK_FALSE(p.vars[v].pruned);
}

TEST_CASE("print and reparse round-trips") {
  Program p = parse_source(kRich, "rich.mc");
  std::string text = print_program(p);
  Program q = parse_source(text, "rich2.mc");
  CHECK(same_ast(p, q));
  CHECK(print_program(q) == text);

  Program f = prune_unused_globals(const_fold(p));
  Program g = parse_source(print_program(f), "rich3.mc");
  CHECK(same_ast(f, g));
}

TEST_CASE("program points are unique") {
  Program p = parse_source(kRich);
  std::set<int> ids;
  int count = 0;
  std::function<void(const ExprPtr&)> we = [&](const ExprPtr& e) {
    if (!e) return;
    ids.insert(e->pt.id);
    ++count;
    we(e->a);
    we(e->b);
  };
  std::function<void(const StmtPtr&)> ws = [&](const StmtPtr& s) {
    if (!s) return;
    ids.insert(s->pt.id);
    ++count;
    we(s->lhs);
    we(s->expr);
    for (auto& a : s->args) we(a);
    for (auto& st : s->body) ws(st);
    ws(s->then_s);
    ws(s->else_s);
  };
  for (const auto& f : p.funs) ws(f.body);
  CHECK(static_cast<int>(ids.size()) == count);
}
