#include "miniastree/linear_form.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "miniastree/rounding.hpp"

namespace miniastree {

using namespace rounding;

namespace {

bool is_zero(const FloatInterval& c) { return !c.is_bottom() && c.lo() == 0 && c.hi() == 0; }

FloatInterval reciprocal(const FloatInterval& d) {
  // Caller guarantees 0 is excluded.
  return FloatInterval(div_down(1.0, d.hi()), div_up(1.0, d.lo()));
}

// Round-to-nearest of n*dmin - k*dmin/2 (or + for upper), exact in the
// range where doubles are the multiples of denorm_min.
std::optional<double> subnormal_rn(double bound, int k, bool upper) {
  if (!(std::fabs(bound) < 0x1p-1022) || k > (1 << 20)) return std::nullopt;
  int64_t n = static_cast<int64_t>(bound / kDenormMin);
  int64_t m = 2 * n + (upper ? k : -k);
  int64_t r;
  if (m % 2 == 0) {
    r = m / 2;
  } else {
    int64_t a = (m - 1) / 2, b = (m + 1) / 2;
    if (m < 0) {
      a = -((-m + 1) / 2);
      b = -((-m - 1) / 2);
    }
    r = (a % 2 == 0) ? a : b;
  }
  return static_cast<double>(r) * kDenormMin;
}

}  // namespace

LinearForm LinearForm::constant(const FloatInterval& c) {
  LinearForm f;
  f.constant_ = c;
  return f;
}

LinearForm LinearForm::variable(int cell) {
  LinearForm f;
  f.terms_.push_back({cell, FloatInterval(1.0, 1.0)});
  return f;
}

FloatInterval LinearForm::coeff(int cell) const {
  for (const auto& t : terms_)
    if (t.cell == cell) return t.coeff;
  return FloatInterval(0.0, 0.0);
}

LinearForm LinearForm::add(const LinearForm& o) const {
  LinearForm r;
  size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && terms_[i].cell < o.terms_[j].cell)) {
      r.terms_.push_back(terms_[i++]);
    } else if (i == terms_.size() || o.terms_[j].cell < terms_[i].cell) {
      r.terms_.push_back(o.terms_[j++]);
    } else {
      FloatInterval c = terms_[i].coeff.add(o.terms_[j].coeff);
      if (!is_zero(c)) r.terms_.push_back({terms_[i].cell, c});
      ++i;
      ++j;
    }
  }
  r.constant_ = constant_.add(o.constant_);
  r.half_denorms_ = half_denorms_ + o.half_denorms_;
  return r;
}

LinearForm LinearForm::neg() const {
  LinearForm r = *this;
  for (auto& t : r.terms_) t.coeff = t.coeff.neg();
  r.constant_ = constant_.neg();
  return r;
}

LinearForm LinearForm::sub(const LinearForm& o) const { return add(o.neg()); }

LinearForm LinearForm::scale(const FloatInterval& c) const {
  LinearForm r;
  for (const auto& t : terms_) {
    FloatInterval k = t.coeff.mul(c);
    if (!is_zero(k)) r.terms_.push_back({t.cell, k});
  }
  r.constant_ = full_constant().mul(c);
  return r;
}

LinearForm LinearForm::plus_constant(const FloatInterval& c) const {
  LinearForm r = *this;
  r.constant_ = constant_.add(c);
  return r;
}

LinearForm LinearForm::without(int cell) const {
  LinearForm r = *this;
  r.terms_.erase(std::remove_if(r.terms_.begin(), r.terms_.end(), [&](const LinearTerm& t) { return t.cell == cell; }),
                 r.terms_.end());
  return r;
}

LinearForm LinearForm::rounded(ErrorModel model, const FloatModel& fm, double magnitude) const {
  if (model == ErrorModel::Absolute) {
    double e = add_up(mul_up(fm.f, magnitude), fm.denorm_min);
    return plus_constant(FloatInterval(-e, e));
  }
  FloatInterval rel(sub_down(1.0, fm.f), add_up(1.0, fm.f));
  LinearForm r;
  for (const auto& t : terms_) r.terms_.push_back({t.cell, t.coeff.mul(rel)});
  // Earlier half-denormal terms would be scaled too; fold them outward.
  r.constant_ = full_constant().mul(rel);
  r.half_denorms_ = 1;
  return r;
}

FloatInterval LinearForm::full_constant() const {
  if (half_denorms_ == 0) return constant_;
  double e = mul_up(static_cast<double>((half_denorms_ + 1) / 2), kDenormMin);
  return constant_.add(FloatInterval(-e, e));
}

FloatInterval LinearForm::eval(const std::function<FloatInterval(int)>& range) const {
  FloatInterval acc = full_constant();
  for (const auto& t : terms_) {
    FloatInterval r = range(t.cell);
    if (r.is_bottom()) return FloatInterval::bottom();
    acc = acc.add(t.coeff.mul(r.without_nan()));
  }
  return acc;
}

FloatInterval LinearForm::eval_rounded_result(const std::function<FloatInterval(int)>& range) const {
  FloatInterval acc = constant_;
  for (const auto& t : terms_) {
    FloatInterval r = range(t.cell);
    if (r.is_bottom()) return FloatInterval::bottom();
    acc = acc.add(t.coeff.mul(r.without_nan()));
  }
  if (acc.is_bottom() || half_denorms_ == 0) return acc;
  double slack = mul_up(static_cast<double>((half_denorms_ + 1) / 2), kDenormMin);
  double lo = subnormal_rn(acc.lo(), half_denorms_, false).value_or(sub_down(acc.lo(), slack));
  double hi = subnormal_rn(acc.hi(), half_denorms_, true).value_or(add_up(acc.hi(), slack));
  return FloatInterval(lo, hi);
}

std::string LinearForm::to_string(const std::function<std::string(int)>& name) const {
  std::ostringstream os;
  for (const auto& t : terms_) os << t.coeff.to_string() << "*" << name(t.cell) << " + ";
  os << full_constant().to_string();
  return os.str();
}

namespace {

class Linearizer {
 public:
  Linearizer(LinearContext& ctx, const LinearizeOptions& opt) : ctx_(ctx), opt_(opt) {}

  std::optional<LinearForm> run(const Expr& e, bool outer) {
    switch (e.kind) {
      case ExprKind::IntLit: return LinearForm::constant(FloatInterval::singleton(static_cast<double>(e.ival)));
      case ExprKind::FloatLit: return LinearForm::constant(FloatInterval::singleton(e.fval));
      case ExprKind::BoolLit: return std::nullopt;
      case ExprKind::Var:
      case ExprKind::Field:
      case ExprKind::Index: {
        if (e.type == ScalarType::Bool) return std::nullopt;
        int c = ctx_.cell_of(e);
        if (c >= 0) return LinearForm::variable(c);
        return intervalize(e);
      }
      case ExprKind::Unary: {
        if (e.uop != UnOp::Neg) return std::nullopt;
        auto a = run(*e.a, false);
        if (!a) return std::nullopt;
        return a->neg();
      }
      case ExprKind::Cast:
        if (e.type == ScalarType::Float && e.a->type == ScalarType::Int) return run(*e.a, false);
        if (e.type == ScalarType::Int && e.a->type == ScalarType::Float) return intervalize(e);
        return std::nullopt;
      case ExprKind::Binary: return binary(e, outer);
    }
    return std::nullopt;
  }

 private:
  LinearContext& ctx_;
  const LinearizeOptions& opt_;

  std::optional<LinearForm> intervalize(const Expr& e) {
    Value v = ctx_.value_of(e);
    if (v.is_bottom()) return std::nullopt;
    return LinearForm::constant(v.to_float_interval().without_nan());
  }

  LinearForm round(const Expr& e, const LinearForm& f, bool outer) {
    if (e.type != ScalarType::Float || (outer && !opt_.round_outer)) return f;
    double m = ctx_.value_of(e).to_float_interval().magnitude();
    return f.rounded(opt_.model, opt_.fm, m);
  }

  std::optional<LinearForm> binary(const Expr& e, bool outer) {
    if (!is_arith(e.bop)) return std::nullopt;
    bool is_float = e.type == ScalarType::Float;
    switch (e.bop) {
      case BinOp::Add:
      case BinOp::Sub: {
        auto a = run(*e.a, false);
        auto b = run(*e.b, false);
        if (!a || !b) return std::nullopt;
        return round(e, e.bop == BinOp::Add ? a->add(*b) : a->sub(*b), outer);
      }
      case BinOp::Mul: {
        auto a = run(*e.a, false);
        auto b = run(*e.b, false);
        if (!a || !b) return std::nullopt;
        LinearForm r;
        if (a->is_constant()) {
          r = b->scale(a->full_constant());
        } else if (b->is_constant()) {
          r = a->scale(b->full_constant());
        } else {
          FloatInterval ia = ctx_.value_of(*e.a).to_float_interval().without_nan();
          FloatInterval ib = ctx_.value_of(*e.b).to_float_interval().without_nan();
          if (ia.is_bottom() || ib.is_bottom()) return std::nullopt;
          double wa = ia.hi() - ia.lo(), wb = ib.hi() - ib.lo();
          r = wa <= wb ? b->scale(ia) : a->scale(ib);
        }
        return round(e, r, outer);
      }
      case BinOp::Div: {
        if (!is_float) return intervalize(e);
        auto a = run(*e.a, false);
        if (!a) return std::nullopt;
        FloatInterval d = ctx_.value_of(*e.b).to_float_interval().without_nan();
        if (d.is_bottom() || d.contains(0.0)) return std::nullopt;
        return round(e, a->scale(reciprocal(d)), outer);
      }
      default: return intervalize(e);
    }
  }
};

}  // namespace

std::optional<LinearForm> linearize(const Expr& e, LinearContext& ctx, const LinearizeOptions& opt) {
  if (e.type == ScalarType::Bool) return std::nullopt;
  Linearizer l(ctx, opt);
  return l.run(e, true);
}

}  // namespace miniastree
