#include "miniastree/clocked.hpp"

namespace miniastree {

ClockedValue ClockedValue::from_value(const IntInterval& v, const IntInterval& clock) {
  if (v.is_bottom() || clock.is_bottom()) return bottom();
  return {v, v.sub(clock), v.add(clock)};
}

ClockedValue ClockedValue::shift(const IntInterval& c) const {
  if (is_bottom() || c.is_bottom()) return bottom();
  return {v.add(c), minus.add(c), plus.add(c)};
}

ClockedValue ClockedValue::tick() const {
  if (is_bottom()) return bottom();
  return {v, minus.sub(IntInterval::singleton(1)), plus.add(IntInterval::singleton(1))};
}

IntInterval ClockedValue::reduce(const IntInterval& clock) const {
  if (is_bottom() || clock.is_bottom()) return IntInterval::bottom();
  return v.meet(minus.add(clock)).meet(plus.sub(clock));
}

ClockedValue ClockedValue::normalized(const IntInterval& clock) const {
  IntInterval nv = reduce(clock);
  if (nv.is_bottom()) return bottom();
  ClockedValue r{nv, minus.meet(nv.sub(clock)), plus.meet(nv.add(clock))};
  if (r.is_bottom()) return bottom();
  return r;
}

ClockedValue ClockedValue::refine(const IntInterval& nv, const IntInterval& clock) const {
  ClockedValue r = *this;
  r.v = v.meet(nv);
  return r.normalized(clock);
}

ClockedValue ClockedValue::join(const ClockedValue& o) const {
  if (is_bottom()) return o;
  if (o.is_bottom()) return *this;
  return {v.join(o.v), minus.join(o.minus), plus.join(o.plus)};
}

ClockedValue ClockedValue::widen(const ClockedValue& o, const ThresholdSet& t) const {
  if (is_bottom()) return o;
  if (o.is_bottom()) return *this;
  return {v.widen(o.v, t), minus.widen(o.minus, t), plus.widen(o.plus, t)};
}

ClockedValue ClockedValue::narrow(const ClockedValue& o, const ThresholdSet& t) const {
  if (is_bottom() || o.is_bottom()) return bottom();
  return {v.narrow(o.v, t), minus.narrow(o.minus, t), plus.narrow(o.plus, t)};
}

bool ClockedValue::leq(const ClockedValue& o) const {
  if (is_bottom()) return true;
  if (o.is_bottom()) return false;
  return v.leq(o.v) && minus.leq(o.minus) && plus.leq(o.plus);
}

std::string ClockedValue::to_string() const {
  if (is_bottom()) return "_|_";
  return "(" + v.to_string() + ", " + minus.to_string() + ", " + plus.to_string() + ")";
}

}  // namespace miniastree
