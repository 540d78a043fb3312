#include "miniastree/interval.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "miniastree/rounding.hpp"

namespace miniastree {

namespace r = rounding;

const char* scalar_type_name(ScalarType t) {
  switch (t) {
    case ScalarType::Int: return "int";
    case ScalarType::Float: return "float";
    case ScalarType::Bool: return "bool";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// ThresholdSet

ThresholdSet::ThresholdSet() : values_{-r::kInf, r::kInf} {}

ThresholdSet::ThresholdSet(std::vector<double> values) : values_(std::move(values)) {
  values_.push_back(-r::kInf);
  values_.push_back(r::kInf);
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
}

ThresholdSet ThresholdSet::geometric(double alpha, double lambda, int count) {
  if (!(alpha > 0) || !(lambda > 1) || count < 0)
    throw std::invalid_argument("threshold parameters need alpha > 0, lambda > 1, count >= 0");
  std::vector<double> v;
  double x = alpha;
  for (int k = 0; k <= count && std::isfinite(x); ++k) {
    v.push_back(x);
    v.push_back(-x);
    x *= lambda;
  }
  return ThresholdSet(std::move(v));
}

double ThresholdSet::below(double x) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return it == values_.begin() ? -r::kInf : *std::prev(it);
}

double ThresholdSet::above(double x) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), x);
  return it == values_.end() ? r::kInf : *it;
}

bool ThresholdSet::contains(double x) const {
  return std::binary_search(values_.begin(), values_.end(), x);
}

// ---------------------------------------------------------------------------
// IntInterval

namespace {

using i128 = __int128;

constexpr int64_t kNegInf = IntInterval::kNegInf;
constexpr int64_t kPosInf = IntInterval::kPosInf;

int64_t saturate(i128 v) {
  if (v <= static_cast<i128>(kNegInf)) return kNegInf;
  if (v >= static_cast<i128>(kPosInf)) return kPosInf;
  return static_cast<int64_t>(v);
}

bool is_inf(int64_t v) { return v == kNegInf || v == kPosInf; }

// Sum of two bounds; `lower` picks the direction for inf + (-inf).
int64_t add_bound(int64_t a, int64_t b, bool lower) {
  bool ninf = a == kNegInf || b == kNegInf;
  bool pinf = a == kPosInf || b == kPosInf;
  if (ninf && pinf) return lower ? kNegInf : kPosInf;
  if (ninf) return kNegInf;
  if (pinf) return kPosInf;
  return saturate(static_cast<i128>(a) + b);
}

int64_t neg_bound(int64_t a) {
  if (a == kNegInf) return kPosInf;
  if (a == kPosInf) return kNegInf;
  return -a;
}

int64_t mul_bound(int64_t a, int64_t b) {
  if (a == 0 || b == 0) return 0;
  if (is_inf(a) || is_inf(b)) return ((a < 0) != (b < 0)) ? kNegInf : kPosInf;
  return saturate(static_cast<i128>(a) * b);
}

// Truncated quotient of bounds; b != 0.
int64_t div_bound(int64_t a, int64_t b) {
  if (is_inf(b)) return 0;
  if (is_inf(a)) return ((a < 0) != (b < 0)) ? kNegInf : kPosInf;
  return saturate(static_cast<i128>(a) / b);
}

int64_t to_int_bound(double t, bool lower) {
  if (std::isinf(t)) return t < 0 ? kNegInf : kPosInf;
  if (t <= -0x1p62) return kNegInf;
  if (t >= 0x1p62) return kPosInf;
  return static_cast<int64_t>(lower ? std::floor(t) : std::ceil(t));
}

IntInterval hull(std::initializer_list<int64_t> cs) {
  return {*std::min_element(cs.begin(), cs.end()), *std::max_element(cs.begin(), cs.end())};
}

std::string bound_text(int64_t v) {
  if (v == kNegInf) return "-inf";
  if (v == kPosInf) return "+inf";
  return std::to_string(v);
}

std::string bound_text(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "+inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

IntInterval::IntInterval(int64_t lo, int64_t hi) : lo_(lo), hi_(hi), bottom_(lo > hi) {
  if (bottom_) {
    lo_ = 0;
    hi_ = -1;
  }
}

IntInterval IntInterval::join(const IntInterval& o) const {
  if (bottom_) return o;
  if (o.bottom_) return *this;
  return {std::min(lo_, o.lo_), std::max(hi_, o.hi_)};
}

IntInterval IntInterval::meet(const IntInterval& o) const {
  if (bottom_ || o.bottom_) return bottom();
  return {std::max(lo_, o.lo_), std::min(hi_, o.hi_)};
}

bool IntInterval::leq(const IntInterval& o) const {
  if (bottom_) return true;
  if (o.bottom_) return false;
  return o.lo_ <= lo_ && hi_ <= o.hi_;
}

IntInterval IntInterval::widen(const IntInterval& next, const ThresholdSet& t) const {
  if (bottom_) return next;
  if (next.bottom_) return *this;
  int64_t lo = next.lo_ < lo_ ? to_int_bound(t.below(static_cast<double>(next.lo_)), true) : lo_;
  int64_t hi = next.hi_ > hi_ ? to_int_bound(t.above(static_cast<double>(next.hi_)), false) : hi_;
  // Thresholds between two integers must still cover the new bound.
  lo = std::min(lo, next.lo_);
  hi = std::max(hi, next.hi_);
  return {lo, hi};
}

IntInterval IntInterval::narrow(const IntInterval& next, const ThresholdSet& t) const {
  if (bottom_ || next.bottom_) return bottom();
  int64_t lo = lo_;
  int64_t hi = hi_;
  if (lo_ == kNegInf || t.contains(static_cast<double>(lo_))) lo = std::max(lo_, next.lo_);
  if (hi_ == kPosInf || t.contains(static_cast<double>(hi_))) hi = std::min(hi_, next.hi_);
  return {lo, hi};
}

IntInterval IntInterval::add(const IntInterval& o) const {
  if (bottom_ || o.bottom_) return bottom();
  return {add_bound(lo_, o.lo_, true), add_bound(hi_, o.hi_, false)};
}

IntInterval IntInterval::sub(const IntInterval& o) const { return add(o.neg()); }

IntInterval IntInterval::neg() const {
  if (bottom_) return bottom();
  return {neg_bound(hi_), neg_bound(lo_)};
}

std::string IntInterval::to_string() const {
  if (bottom_) return "_|_";
  return "[" + bound_text(lo_) + ", " + bound_text(hi_) + "]";
}

// ---------------------------------------------------------------------------
// FloatInterval

FloatInterval::FloatInterval(double lo, double hi, bool maybe_nan)
    : lo_(lo), hi_(hi), maybe_nan_(maybe_nan), bottom_(!(lo <= hi)) {
  if (bottom_) {
    lo_ = 0;
    hi_ = -1;
    // A NaN-only value is still a reachable concrete value.
    if (maybe_nan) bottom_ = false;
  }
}

FloatInterval FloatInterval::top() { return {-r::kInf, r::kInf, true}; }
FloatInterval FloatInterval::finite() { return {-r::kMax, r::kMax}; }

bool FloatInterval::contains(double v) const {
  if (bottom_) return false;
  if (std::isnan(v)) return maybe_nan_;
  return lo_ <= v && v <= hi_;
}

double FloatInterval::magnitude() const {
  if (bottom_ || lo_ > hi_) return 0.0;
  return std::max(std::fabs(lo_), std::fabs(hi_));
}

FloatInterval FloatInterval::join(const FloatInterval& o) const {
  if (bottom_) return o;
  if (o.bottom_) return *this;
  bool nan = maybe_nan_ || o.maybe_nan_;
  if (lo_ > hi_) return {o.lo_, o.hi_, nan};
  if (o.lo_ > o.hi_) return {lo_, hi_, nan};
  return {std::min(lo_, o.lo_), std::max(hi_, o.hi_), nan};
}

FloatInterval FloatInterval::meet(const FloatInterval& o) const {
  if (bottom_ || o.bottom_) return bottom();
  return {std::max(lo_, o.lo_), std::min(hi_, o.hi_), maybe_nan_ && o.maybe_nan_};
}

bool FloatInterval::leq(const FloatInterval& o) const {
  if (bottom_) return true;
  if (o.bottom_) return false;
  if (maybe_nan_ && !o.maybe_nan_) return false;
  if (lo_ > hi_) return true;
  return o.lo_ <= lo_ && hi_ <= o.hi_;
}

FloatInterval FloatInterval::widen(const FloatInterval& next, const ThresholdSet& t) const {
  if (bottom_ || lo_ > hi_) return next;
  if (next.bottom_ || next.lo_ > next.hi_) return {lo_, hi_, maybe_nan_ || next.maybe_nan_};
  double lo = next.lo_ < lo_ ? t.below(next.lo_) : lo_;
  double hi = next.hi_ > hi_ ? t.above(next.hi_) : hi_;
  return {lo, hi, maybe_nan_ || next.maybe_nan_};
}

FloatInterval FloatInterval::narrow(const FloatInterval& next, const ThresholdSet& t) const {
  if (bottom_ || next.bottom_) return bottom();
  if (lo_ > hi_ || next.lo_ > next.hi_) return meet(next);
  double lo = lo_;
  double hi = hi_;
  if (std::isinf(lo_) || t.contains(lo_)) lo = std::max(lo_, next.lo_);
  if (std::isinf(hi_) || t.contains(hi_)) hi = std::min(hi_, next.hi_);
  return {lo, hi, maybe_nan_ && next.maybe_nan_};
}

FloatInterval FloatInterval::without_nan() const {
  if (bottom_ || lo_ > hi_) return bottom();
  return {lo_, hi_, false};
}

FloatInterval FloatInterval::add(const FloatInterval& o) const {
  if (bottom_ || o.bottom_) return bottom();
  return {r::add_down(lo_, o.lo_), r::add_up(hi_, o.hi_), maybe_nan_ || o.maybe_nan_};
}

FloatInterval FloatInterval::sub(const FloatInterval& o) const { return add(o.neg()); }

FloatInterval FloatInterval::neg() const {
  if (bottom_) return bottom();
  if (lo_ > hi_) return *this;
  return {-hi_, -lo_, maybe_nan_};
}

FloatInterval FloatInterval::mul(const FloatInterval& o) const {
  if (bottom_ || o.bottom_) return bottom();
  double lo = std::min({r::mul_down(lo_, o.lo_), r::mul_down(lo_, o.hi_), r::mul_down(hi_, o.lo_),
                        r::mul_down(hi_, o.hi_)});
  double hi = std::max({r::mul_up(lo_, o.lo_), r::mul_up(lo_, o.hi_), r::mul_up(hi_, o.lo_),
                        r::mul_up(hi_, o.hi_)});
  return {lo, hi, maybe_nan_ || o.maybe_nan_};
}

bool FloatInterval::operator==(const FloatInterval& o) const {
  if (bottom_ != o.bottom_) return false;
  if (bottom_) return true;
  return lo_ == o.lo_ && hi_ == o.hi_ && maybe_nan_ == o.maybe_nan_ &&
         std::signbit(lo_) == std::signbit(o.lo_) && std::signbit(hi_) == std::signbit(o.hi_);
}

std::string FloatInterval::to_string() const {
  if (bottom_) return "_|_";
  std::string s = lo_ > hi_ ? "{}" : "[" + bound_text(lo_) + ", " + bound_text(hi_) + "]";
  if (maybe_nan_) s += "+NaN";
  return s;
}

// ---------------------------------------------------------------------------
// Value

Value::Value(ScalarType type, IntInterval i) : type_(type), int_(i) {
  assert(type != ScalarType::Float);
}

Value::Value(FloatInterval f) : type_(ScalarType::Float), float_(f) {}

Value Value::bottom(ScalarType type) {
  if (type == ScalarType::Float) return Value(FloatInterval::bottom());
  return Value(type, IntInterval::bottom());
}

Value Value::top(ScalarType type) {
  switch (type) {
    case ScalarType::Float: return Value(FloatInterval::finite());
    case ScalarType::Bool: return Value(ScalarType::Bool, IntInterval(0, 1));
    case ScalarType::Int: return Value(IntInterval::machine_range());
  }
  return {};
}

Value Value::bool_range(bool can_be_false, bool can_be_true) {
  return Value(ScalarType::Bool, IntInterval(can_be_false ? 0 : 1, can_be_true ? 1 : 0));
}

bool Value::is_bottom() const {
  return type_ == ScalarType::Float ? float_.is_bottom() : int_.is_bottom();
}

FloatInterval Value::to_float_interval() const {
  if (type_ == ScalarType::Float) return float_;
  if (int_.is_bottom()) return FloatInterval::bottom();
  auto conv = [](int64_t v) {
    if (v == kNegInf) return -r::kInf;
    if (v == kPosInf) return r::kInf;
    return static_cast<double>(v);
  };
  // Values beyond 2^53 are only infinity sentinels or saturated bounds.
  double lo = conv(int_.lo());
  double hi = conv(int_.hi());
  if (std::isfinite(hi) && std::fabs(hi) > 0x1p53) hi = r::next_up(hi);
  if (std::isfinite(lo) && std::fabs(lo) > 0x1p53) lo = r::next_down(lo);
  return {lo, hi};
}

Value Value::join(const Value& o) const {
  assert((type_ == ScalarType::Float) == (o.type_ == ScalarType::Float));
  if (type_ == ScalarType::Float) return Value(float_.join(o.float_));
  return Value(type_, int_.join(o.int_));
}

Value Value::meet(const Value& o) const {
  if (type_ == ScalarType::Float) return Value(float_.meet(o.float_));
  return Value(type_, int_.meet(o.int_));
}

bool Value::leq(const Value& o) const {
  if (type_ == ScalarType::Float) return float_.leq(o.float_);
  return int_.leq(o.int_);
}

Value Value::widen(const Value& next, const ThresholdSet& t) const {
  if (type_ == ScalarType::Float) return Value(float_.widen(next.float_, t));
  if (type_ == ScalarType::Bool) return Value(type_, int_.join(next.int_));
  // Stored integers never leave the machine range.
  return Value(type_, int_.widen(next.int_, t).meet(int_.join(next.int_).join(IntInterval::machine_range())));
}

Value Value::narrow(const Value& next, const ThresholdSet& t) const {
  if (type_ == ScalarType::Float) return Value(float_.narrow(next.float_, t));
  if (type_ == ScalarType::Bool) return Value(type_, int_.meet(next.int_));
  return Value(type_, int_.narrow(next.int_, t));
}

Value Value::meet_real(const FloatInterval& rr) const {
  if (rr.is_bottom()) return bottom(type_);
  if (type_ == ScalarType::Float) {
    if (rr.lo() > rr.hi()) return Value(float_.meet(rr));
    return Value(float_.meet(FloatInterval(rr.lo(), rr.hi(), true)));
  }
  if (rr.lo() > rr.hi()) return bottom(type_);
  int64_t lo = std::isinf(rr.lo()) ? kNegInf : to_int_bound(std::ceil(rr.lo()), false);
  int64_t hi = std::isinf(rr.hi()) ? kPosInf : to_int_bound(std::floor(rr.hi()), true);
  return Value(type_, int_.meet(IntInterval(lo, hi)));
}

Value Value::perturb(double epsilon) const {
  if (type_ != ScalarType::Float || epsilon <= 0 || float_.is_bottom() || float_.lo() > float_.hi())
    return *this;
  double lo = r::sub_down(float_.lo(), r::mul_up(epsilon, std::fabs(float_.lo())));
  double hi = r::add_up(float_.hi(), r::mul_up(epsilon, std::fabs(float_.hi())));
  return Value(FloatInterval(lo, hi, float_.maybe_nan()));
}

bool Value::operator==(const Value& o) const {
  if (type_ != o.type_) return false;
  return type_ == ScalarType::Float ? float_ == o.float_ : int_ == o.int_;
}

std::string Value::to_string() const {
  return type_ == ScalarType::Float ? float_.to_string() : int_.to_string();
}

// ---------------------------------------------------------------------------
// Arithmetic

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
  }
  return op;
}

CmpOp swap_sides(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Ge: return CmpOp::Le;
    default: return op;
  }
}

const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

namespace {

// Removes out-of-range machine results, flagging an overflow if any.
IntInterval clip_machine(const IntInterval& raw, ErrorFlags& flags) {
  if (raw.is_bottom()) return raw;
  if (raw.lo() < kMachineIntMin || raw.hi() > kMachineIntMax) flags.overflow = true;
  return raw.meet(IntInterval::machine_range());
}

FloatInterval clip_float(const FloatInterval& raw, ErrorFlags& flags) {
  if (raw.is_bottom()) return raw;
  if (raw.maybe_nan()) flags.nan = true;
  if (raw.lo() > raw.hi()) return FloatInterval::bottom();
  if (raw.lo() < -r::kMax || raw.hi() > r::kMax) flags.overflow = true;
  return FloatInterval(std::max(raw.lo(), -r::kMax), std::min(raw.hi(), r::kMax));
}

// Nonzero parts of a divisor.
std::vector<IntInterval> nonzero_parts(const IntInterval& b) {
  std::vector<IntInterval> parts;
  IntInterval neg = b.meet(IntInterval(kNegInf, -1));
  IntInterval pos = b.meet(IntInterval(1, kPosInf));
  if (!neg.is_bottom()) parts.push_back(neg);
  if (!pos.is_bottom()) parts.push_back(pos);
  return parts;
}

std::vector<FloatInterval> nonzero_parts(const FloatInterval& b) {
  std::vector<FloatInterval> parts;
  if (b.lo() > b.hi()) return parts;
  FloatInterval neg = b.meet(FloatInterval(-r::kInf, -r::kDenormMin));
  FloatInterval pos = b.meet(FloatInterval(r::kDenormMin, r::kInf));
  if (!neg.is_bottom() && neg.lo() <= neg.hi()) parts.push_back(neg);
  if (!pos.is_bottom() && pos.lo() <= pos.hi()) parts.push_back(pos);
  return parts;
}

ArithResult int_arith(ArithOp op, ScalarType ty, IntInterval a, IntInterval b) {
  ArithResult res;
  ErrorFlags& fl = res.flags;
  a = a.meet(IntInterval::machine_range());
  b = b.meet(IntInterval::machine_range());
  auto done = [&](IntInterval raw) {
    res.value = Value(ty == ScalarType::Bool ? ScalarType::Int : ty, clip_machine(raw, fl));
    return res;
  };
  bool unary = op == ArithOp::Neg || op == ArithOp::ToInt || op == ArithOp::ToFloat;
  if (a.is_bottom() || (!unary && b.is_bottom())) return done(IntInterval::bottom());
  switch (op) {
    case ArithOp::Add: return done(a.add(b));
    case ArithOp::Sub: return done(a.sub(b));
    case ArithOp::Neg: return done(a.neg());
    case ArithOp::Mul:
      return done(hull({mul_bound(a.lo(), b.lo()), mul_bound(a.lo(), b.hi()),
                        mul_bound(a.hi(), b.lo()), mul_bound(a.hi(), b.hi())}));
    case ArithOp::Div: {
      if (b.contains(0)) fl.div_zero = true;
      IntInterval out;
      for (const auto& p : nonzero_parts(b))
        out = out.join(hull({div_bound(a.lo(), p.lo()), div_bound(a.lo(), p.hi()),
                             div_bound(a.hi(), p.lo()), div_bound(a.hi(), p.hi())}));
      return done(out);
    }
    case ArithOp::Mod: {
      if (b.contains(0)) fl.div_zero = true;
      auto parts = nonzero_parts(b);
      if (parts.empty()) return done(IntInterval::bottom());
      if (a.contains(kMachineIntMin) && b.contains(-1)) fl.overflow = true;
      if (a.is_singleton() && b.is_singleton() && b.lo() != 0)
        return done(IntInterval::singleton(a.lo() % b.lo()));
      int64_t m = 0;
      for (const auto& p : parts) m = std::max({m, neg_bound(p.lo()), p.hi()});
      int64_t m1 = m == kPosInf ? kPosInf : m - 1;
      int64_t lo = a.lo() >= 0 ? 0 : std::max(a.lo(), neg_bound(m1));
      int64_t hi = a.hi() <= 0 ? 0 : std::min(a.hi(), m1);
      return done(IntInterval(lo, hi));
    }
    case ArithOp::Shl:
    case ArithOp::Shr: {
      if (b.lo() < 0 || b.hi() > 31) fl.invalid_shift = true;
      IntInterval s = b.meet(IntInterval(0, 31));
      if (s.is_bottom()) return done(IntInterval::bottom());
      auto shift = [&](int64_t x, int64_t k) -> int64_t {
        if (op == ArithOp::Shl) return mul_bound(x, int64_t{1} << k);
        if (is_inf(x)) return x;
        return x >> k;
      };
      return done(hull({shift(a.lo(), s.lo()), shift(a.lo(), s.hi()), shift(a.hi(), s.lo()),
                        shift(a.hi(), s.hi())}));
    }
    case ArithOp::ToFloat: {
      FloatInterval f = Value(a).to_float_interval();
      res.value = Value(f);
      return res;
    }
    case ArithOp::ToInt: return done(a);
  }
  return done(IntInterval::bottom());
}

ArithResult float_arith(ArithOp op, FloatInterval a, FloatInterval b) {
  ArithResult res;
  ErrorFlags& fl = res.flags;
  if (a.maybe_nan() || (op != ArithOp::Neg && op != ArithOp::ToInt && b.maybe_nan())) fl.nan = true;
  a = a.meet(FloatInterval::finite());
  bool binary = op != ArithOp::Neg && op != ArithOp::ToInt && op != ArithOp::ToFloat;
  if (binary) b = b.meet(FloatInterval::finite());
  auto done = [&](FloatInterval raw) {
    res.value = Value(clip_float(raw, fl));
    return res;
  };
  if (a.is_bottom() || (binary && b.is_bottom())) return done(FloatInterval::bottom());
  switch (op) {
    case ArithOp::Add: return done(a.add(b));
    case ArithOp::Sub: return done(a.sub(b));
    case ArithOp::Neg: return done(a.neg());
    case ArithOp::Mul: return done(a.mul(b));
    case ArithOp::Div: {
      if (b.contains(0.0)) fl.div_zero = true;
      FloatInterval out;
      for (const auto& p : nonzero_parts(b)) {
        double lo = std::min({r::div_down(a.lo(), p.lo()), r::div_down(a.lo(), p.hi()),
                              r::div_down(a.hi(), p.lo()), r::div_down(a.hi(), p.hi())});
        double hi = std::max({r::div_up(a.lo(), p.lo()), r::div_up(a.lo(), p.hi()),
                              r::div_up(a.hi(), p.lo()), r::div_up(a.hi(), p.hi())});
        out = out.join(FloatInterval(lo, hi));
      }
      return done(out);
    }
    case ArithOp::ToInt: {
      // Truncation is defined on (INT_MIN - 1, INT_MAX + 1).
      constexpr double kLow = -2147483649.0;
      constexpr double kHigh = 2147483648.0;
      if (a.lo() <= kLow || a.hi() >= kHigh) fl.overflow = true;
      FloatInterval ok = a.meet(FloatInterval(r::next_up(kLow), r::next_down(kHigh)));
      if (ok.is_bottom() || ok.lo() > ok.hi()) {
        res.value = Value(IntInterval::bottom());
        return res;
      }
      res.value = Value(IntInterval(static_cast<int64_t>(std::trunc(ok.lo())),
                                    static_cast<int64_t>(std::trunc(ok.hi()))));
      return res;
    }
    case ArithOp::ToFloat: return done(a);
    case ArithOp::Mod:
    case ArithOp::Shl:
    case ArithOp::Shr: break;
  }
  throw std::logic_error("operator not defined on floats");
}

}  // namespace

ArithResult arith(ArithOp op, const Value& a, const Value& b) {
  if (a.is_float()) return float_arith(op, a.as_float(), b.as_float());
  return int_arith(op, a.type(), a.as_int(), b.as_int());
}

namespace {

std::optional<std::pair<IntInterval, IntInterval>> int_guard(CmpOp op, IntInterval a, IntInterval b) {
  if (a.is_bottom() || b.is_bottom()) return std::nullopt;
  auto minus1 = [](int64_t v) { return is_inf(v) ? v : v - 1; };
  auto plus1 = [](int64_t v) { return is_inf(v) ? v : v + 1; };
  IntInterval na = a, nb = b;
  switch (op) {
    case CmpOp::Le:
      na = a.meet(IntInterval(kNegInf, b.hi()));
      nb = b.meet(IntInterval(a.lo(), kPosInf));
      break;
    case CmpOp::Lt:
      na = a.meet(IntInterval(kNegInf, minus1(b.hi())));
      nb = b.meet(IntInterval(plus1(a.lo()), kPosInf));
      break;
    case CmpOp::Ge:
    case CmpOp::Gt: {
      auto sw = int_guard(swap_sides(op), b, a);
      if (!sw) return std::nullopt;
      return std::make_pair(sw->second, sw->first);
    }
    case CmpOp::Eq:
      na = nb = a.meet(b);
      break;
    case CmpOp::Ne: {
      auto drop = [](IntInterval x, int64_t v) {
        if (x.lo() == v) x = IntInterval(v + 1, x.hi());
        if (!x.is_bottom() && x.hi() == v) x = IntInterval(x.lo(), v - 1);
        return x;
      };
      if (b.is_singleton()) na = drop(a, b.lo());
      if (a.is_singleton()) nb = drop(b, a.lo());
      break;
    }
  }
  if (na.is_bottom() || nb.is_bottom()) return std::nullopt;
  return std::make_pair(na, nb);
}

std::optional<std::pair<FloatInterval, FloatInterval>> float_guard(CmpOp op, FloatInterval a,
                                                                   FloatInterval b) {
  if (a.is_bottom() || b.is_bottom()) return std::nullopt;
  if (op == CmpOp::Ne) {
    // NaN compares unequal to everything.
    FloatInterval na = a, nb = b;
    auto drop = [](FloatInterval x, double v) {
      if (x.lo() > x.hi()) return x;
      double lo = x.lo(), hi = x.hi();
      if (lo == v) lo = r::next_up(v);
      if (hi == v) hi = r::next_down(v);
      return FloatInterval(lo, hi, x.maybe_nan());
    };
    if (b.is_singleton() && !b.maybe_nan()) na = drop(a, b.lo());
    if (a.is_singleton() && !a.maybe_nan()) nb = drop(b, a.lo());
    if (na.is_bottom() || nb.is_bottom()) return std::nullopt;
    return std::make_pair(na, nb);
  }
  a = a.without_nan();
  b = b.without_nan();
  if (a.is_bottom() || b.is_bottom()) return std::nullopt;
  FloatInterval na = a, nb = b;
  switch (op) {
    case CmpOp::Le:
      na = a.meet(FloatInterval(-r::kInf, b.hi()));
      nb = b.meet(FloatInterval(a.lo(), r::kInf));
      break;
    case CmpOp::Lt:
      na = a.meet(FloatInterval(-r::kInf, r::next_down(b.hi())));
      nb = b.meet(FloatInterval(r::next_up(a.lo()), r::kInf));
      break;
    case CmpOp::Ge:
    case CmpOp::Gt: {
      auto sw = float_guard(swap_sides(op), b, a);
      if (!sw) return std::nullopt;
      return std::make_pair(sw->second, sw->first);
    }
    case CmpOp::Eq:
      na = nb = a.meet(b);
      break;
    case CmpOp::Ne: break;
  }
  if (na.is_bottom() || nb.is_bottom()) return std::nullopt;
  return std::make_pair(na, nb);
}

}  // namespace

std::optional<std::pair<Value, Value>> guard_cmp(CmpOp op, const Value& a, const Value& b) {
  if (a.is_float() != b.is_float()) throw std::logic_error("guard_cmp on mixed operand kinds");
  if (a.is_float()) {
    auto g = float_guard(op, a.as_float(), b.as_float());
    if (!g) return std::nullopt;
    return std::make_pair(Value(g->first), Value(g->second));
  }
  auto g = int_guard(op, a.as_int(), b.as_int());
  if (!g) return std::nullopt;
  return std::make_pair(Value(a.type(), g->first), Value(b.type(), g->second));
}

}  // namespace miniastree
