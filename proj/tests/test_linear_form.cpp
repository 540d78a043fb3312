#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "miniastree/linear_form.hpp"
#include "miniastree/semantics.hpp"

using namespace miniastree;

namespace {

// Interval values of variables given directly, compound values by plain
// interval arithmetic.
class TableContext : public LinearContext {
 public:
  std::map<int, FloatInterval> ranges;

  Value value_of(const Expr& e) override {
    switch (e.kind) {
      case ExprKind::FloatLit: return Value(FloatInterval::singleton(e.fval));
      case ExprKind::Var: return Value(ranges.at(e.var));
      case ExprKind::Unary: return arith(ArithOp::Neg, value_of(*e.a)).value;
      case ExprKind::Binary: return arith(to_arith(e.bop), value_of(*e.a), value_of(*e.b)).value;
      default: return Value(FloatInterval::top());
    }
  }
  int cell_of(const Expr& e) override { return e.kind == ExprKind::Var ? e.var : -1; }
};

struct Case {
  Program p;
  ExprPtr rhs;
};

Case first_rhs(const std::string& decls, const std::string& rhs) {
  Case c;
  c.p = parse_source(decls + " float OUT; void main() { OUT = " + rhs + "; }");
  c.rhs = c.p.funs[c.p.entry].body->body[0]->expr;
  return c;
}

int var_id(const Program& p, const std::string& name) {
  for (const auto& v : p.vars)
    if (v.name == name) return v.id;
  return -1;
}

double concrete(const Expr& e, const std::map<int, double>& at) {
  switch (e.kind) {
    case ExprKind::FloatLit: return e.fval;
    case ExprKind::Var: return at.at(e.var);
    case ExprKind::Unary: return -concrete(*e.a, at);
    case ExprKind::Binary: {
      double a = concrete(*e.a, at), b = concrete(*e.b, at);
      switch (e.bop) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div: return a / b;
        default: break;
      }
    }
    default: break;
  }
  return NAN;
}

}  // namespace

TEST_CASE("X - 0.2*X collapses to about 0.8*X") {
  Case c = first_rhs("float X;", "X - 0.2 * X");
  int x = var_id(c.p, "X");
  TableContext ctx;
  ctx.ranges[x] = FloatInterval(0, 1);
  auto lf = linearize(*c.rhs, ctx, {});
  REQUIRE(lf);
  REQUIRE(lf->terms().size() == 1);
  FloatInterval k = lf->coeff(x);
  CHECK(k.lo() <= 0.8);
  CHECK(k.hi() >= 0.8);
  CHECK(k.hi() - k.lo() < 1e-15);
  FloatInterval r = lf->eval([&](int v) { return ctx.ranges.at(v); });
  CHECK(r.lo() > -1e-15);
  CHECK(r.hi() <= std::nextafter(std::nextafter(0.8, 1.0), 1.0));
  // Plain interval arithmetic loses the correlation.
  FloatInterval plain = ctx.value_of(*c.rhs).as_float();
  CHECK(plain.lo() <= -0.2);
  CHECK(plain.hi() >= 1.0);
}

TEST_CASE("a float constant has no terms") {
  Case c = first_rhs("", "3.0");
  TableContext ctx;
  auto lf = linearize(*c.rhs, ctx, {});
  REQUIRE(lf);
  CHECK(lf->is_constant());
  CHECK(lf->full_constant() == FloatInterval(3, 3));
}

TEST_CASE("products intervalize one side") {
  Case c = first_rhs("float X; float Y;", "X * Y");
  int x = var_id(c.p, "X"), y = var_id(c.p, "Y");
  TableContext ctx;
  ctx.ranges[x] = FloatInterval(1, 2);
  ctx.ranges[y] = FloatInterval(-3, 5);
  auto lf = linearize(*c.rhs, ctx, {});
  REQUIRE(lf);
  REQUIRE(lf->terms().size() == 1);
  auto range = [&](int v) { return ctx.ranges.at(v); };
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(1, 2), uy(-3, 5);
  for (int i = 0; i < 2000; ++i) {
    double vx = ux(rng), vy = uy(rng);
    double prod = vx * vy;
    // The form keeps one variable symbolic: evaluating at that point fixes it.
    int kept = lf->terms()[0].cell;
    auto fixed = [&](int v) { return v == kept ? FloatInterval::singleton(v == x ? vx : vy) : range(v); };
    CHECK(lf->eval(fixed).contains(FloatInterval::singleton(prod)));
  }
}

TEST_CASE("linear forms over-approximate double evaluation") {
  const char* exprs[] = {"A + B * 0.3 - C", "(A - B) * 2.5 + A / 4.0", "-(A + 0.1) - (0.7 * C - B)",
                         "A * 0.1 + A * 0.2 + A * 0.3", "(A + B) / 3.0 - C * 7.25"};
  std::mt19937_64 rng(12);
  for (const char* src : exprs) {
    Case c = first_rhs("float A; float B; float C;", src);
    int a = var_id(c.p, "A"), b = var_id(c.p, "B"), cc = var_id(c.p, "C");
    TableContext ctx;
    ctx.ranges[a] = FloatInterval(-1e3, 2e3);
    ctx.ranges[b] = FloatInterval(-1e-300, 1e-300);
    ctx.ranges[cc] = FloatInterval(0.5, 0.75);
    for (ErrorModel m : {ErrorModel::Absolute, ErrorModel::Relative}) {
      LinearizeOptions opt;
      opt.model = m;
      auto lf = linearize(*c.rhs, ctx, opt);
      REQUIRE(lf);
      auto range = [&](int v) { return ctx.ranges.at(v); };
      FloatInterval whole = m == ErrorModel::Absolute ? lf->eval(range) : lf->eval_rounded_result(range);
      for (int i = 0; i < 500; ++i) {
        std::map<int, double> at;
        for (int v : {a, b, cc}) {
          const FloatInterval& r = ctx.ranges[v];
          at[v] = std::uniform_real_distribution<double>(r.lo(), r.hi())(rng);
        }
        double got = concrete(*c.rhs, at);
        CHECK(whole.contains(FloatInterval::singleton(got)));
        auto point = [&](int v) { return FloatInterval::singleton(at.at(v)); };
        FloatInterval pf = m == ErrorModel::Absolute ? lf->eval(point) : lf->eval_rounded_result(point);
        CHECK(pf.contains(FloatInterval::singleton(got)));
      }
    }
  }
}
