#pragma once

// Interval abstract domain over 32-bit machine integers and IEEE doubles.
//
// Transfer functions return the non-erroneous continuation of an operation
// (faulting concrete outcomes are removed from the result) together with
// flags telling which faults are possible.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace miniastree {

enum class ScalarType { Int, Float, Bool };

const char* scalar_type_name(ScalarType t);

// Machine integer range of the analyzed target.
inline constexpr int64_t kMachineIntMin = std::numeric_limits<int32_t>::min();
inline constexpr int64_t kMachineIntMax = std::numeric_limits<int32_t>::max();

struct FloatModel {
  // Greatest relative error of round-to-nearest.
  double f = 0x1p-53;
  double denorm_min = std::numeric_limits<double>::denorm_min();
  double overflow_threshold = std::numeric_limits<double>::max();
};

struct ErrorFlags {
  bool div_zero = false;
  bool overflow = false;
  bool invalid_shift = false;
  bool nan = false;
  bool array_bounds = false;

  bool any() const { return div_zero || overflow || invalid_shift || nan || array_bounds; }
  ErrorFlags& operator|=(const ErrorFlags& o) {
    div_zero |= o.div_zero;
    overflow |= o.overflow;
    invalid_shift |= o.invalid_shift;
    nan |= o.nan;
    array_bounds |= o.array_bounds;
    return *this;
  }
};

class ThresholdSet {
 public:
  // {-inf, +inf} only: widening jumps straight to infinity.
  ThresholdSet();
  explicit ThresholdSet(std::vector<double> values);

  // {+-alpha * lambda^k | 0 <= k <= count} plus +-inf.
  static ThresholdSet geometric(double alpha, double lambda, int count);

  const std::vector<double>& values() const { return values_; }
  size_t size() const { return values_.size(); }
  // Largest threshold <= x / smallest threshold >= x.
  double below(double x) const;
  double above(double x) const;
  bool contains(double x) const;

 private:
  std::vector<double> values_;
};

class IntInterval {
 public:
  static constexpr int64_t kNegInf = std::numeric_limits<int64_t>::min();
  static constexpr int64_t kPosInf = std::numeric_limits<int64_t>::max();

  IntInterval() = default;  // bottom
  IntInterval(int64_t lo, int64_t hi);

  static IntInterval bottom() { return {}; }
  static IntInterval top() { return {kNegInf, kPosInf}; }
  static IntInterval singleton(int64_t v) { return {v, v}; }
  static IntInterval machine_range() { return {kMachineIntMin, kMachineIntMax}; }

  bool is_bottom() const { return bottom_; }
  bool is_top() const { return !bottom_ && lo_ == kNegInf && hi_ == kPosInf; }
  bool is_singleton() const { return !bottom_ && lo_ == hi_ && lo_ != kNegInf && lo_ != kPosInf; }
  int64_t lo() const { return lo_; }
  int64_t hi() const { return hi_; }
  bool contains(int64_t v) const { return !bottom_ && lo_ <= v && v <= hi_; }
  bool contains(const IntInterval& o) const { return o.leq(*this); }

  IntInterval join(const IntInterval& o) const;
  IntInterval meet(const IntInterval& o) const;
  bool leq(const IntInterval& o) const;
  IntInterval widen(const IntInterval& next, const ThresholdSet& t) const;
  IntInterval narrow(const IntInterval& next, const ThresholdSet& t) const;

  // Exact mathematical shift by [c, d] (saturating at infinities).
  IntInterval add(const IntInterval& o) const;
  IntInterval sub(const IntInterval& o) const;
  IntInterval neg() const;

  bool operator==(const IntInterval& o) const {
    return bottom_ == o.bottom_ && (bottom_ || (lo_ == o.lo_ && hi_ == o.hi_));
  }
  std::string to_string() const;

 private:
  int64_t lo_ = 0;
  int64_t hi_ = -1;
  bool bottom_ = true;
};

class FloatInterval {
 public:
  FloatInterval() = default;  // bottom
  FloatInterval(double lo, double hi, bool maybe_nan = false);

  static FloatInterval bottom() { return {}; }
  static FloatInterval top();
  // Every finite double.
  static FloatInterval finite();
  static FloatInterval singleton(double v) { return {v, v}; }

  bool is_bottom() const { return bottom_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool maybe_nan() const { return maybe_nan_; }
  bool is_singleton() const { return !bottom_ && lo_ == hi_; }
  bool contains(double v) const;
  bool contains(const FloatInterval& o) const { return o.leq(*this); }
  // Largest absolute value.
  double magnitude() const;

  FloatInterval join(const FloatInterval& o) const;
  FloatInterval meet(const FloatInterval& o) const;
  bool leq(const FloatInterval& o) const;
  FloatInterval widen(const FloatInterval& next, const ThresholdSet& t) const;
  FloatInterval narrow(const FloatInterval& next, const ThresholdSet& t) const;
  FloatInterval without_nan() const;

  // Real-field interval arithmetic, outward rounded, no error flags.
  FloatInterval add(const FloatInterval& o) const;
  FloatInterval sub(const FloatInterval& o) const;
  FloatInterval mul(const FloatInterval& o) const;
  FloatInterval neg() const;

  bool operator==(const FloatInterval& o) const;
  std::string to_string() const;

 private:
  double lo_ = 0;
  double hi_ = -1;
  bool maybe_nan_ = false;
  bool bottom_ = true;
};

// Abstract scalar: integer (also used for booleans) or float interval.
class Value {
 public:
  Value() = default;  // bottom int
  Value(ScalarType type, IntInterval i);
  Value(FloatInterval f);
  explicit Value(IntInterval i) : Value(ScalarType::Int, i) {}

  static Value bottom(ScalarType type);
  static Value top(ScalarType type);
  static Value of_int(int64_t v) { return Value(IntInterval::singleton(v)); }
  static Value of_bool(bool b) { return Value(ScalarType::Bool, IntInterval::singleton(b ? 1 : 0)); }
  static Value of_float(double v) { return Value(FloatInterval::singleton(v)); }
  static Value bool_range(bool can_be_false, bool can_be_true);

  ScalarType type() const { return type_; }
  bool is_float() const { return type_ == ScalarType::Float; }
  bool is_bottom() const;
  const IntInterval& as_int() const { return int_; }
  const FloatInterval& as_float() const { return float_; }
  // Real-valued hull of any scalar.
  FloatInterval to_float_interval() const;
  bool may_be_true() const { return !is_bottom() && int_.hi() >= 1; }
  bool may_be_false() const { return !is_bottom() && int_.lo() <= 0; }

  Value join(const Value& o) const;
  Value meet(const Value& o) const;
  bool leq(const Value& o) const;
  Value widen(const Value& next, const ThresholdSet& t) const;
  Value narrow(const Value& next, const ThresholdSet& t) const;
  // Meet with a real interval, rounding inward to integers for integer types.
  Value meet_real(const FloatInterval& r) const;
  // Outward inflation [a - eps|a|, b + eps|b|] of float values.
  Value perturb(double epsilon) const;

  bool operator==(const Value& o) const;
  std::string to_string() const;

 private:
  ScalarType type_ = ScalarType::Int;
  IntInterval int_;
  FloatInterval float_;
};

enum class ArithOp { Add, Sub, Mul, Div, Mod, Shl, Shr, Neg, ToInt, ToFloat };
enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

CmpOp negate(CmpOp op);
CmpOp swap_sides(CmpOp op);
const char* cmp_op_text(CmpOp op);

struct ArithResult {
  Value value;
  ErrorFlags flags;
};

// Unary operations (Neg, ToInt, ToFloat) ignore `b`.
ArithResult arith(ArithOp op, const Value& a, const Value& b = Value());

// Refines both operands under `a op b`; nullopt when no pair satisfies it.
std::optional<std::pair<Value, Value>> guard_cmp(CmpOp op, const Value& a, const Value& b);

}  // namespace miniastree
