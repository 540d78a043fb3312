#pragma once

// Integer values tracked together with their offsets to the hidden clock:
// the triple (x, x - clock, x + clock).

#include <cstdint>
#include <string>

#include "miniastree/interval.hpp"

namespace miniastree {

struct ClockConfig {
  int64_t max_ticks = 1000000;
};

struct ClockedValue {
  IntInterval v;
  IntInterval minus;  // x - clock
  IntInterval plus;   // x + clock

  static ClockedValue bottom() { return {}; }
  // Offsets computed from v and the clock range alone.
  static ClockedValue from_value(const IntInterval& v, const IntInterval& clock);

  bool is_bottom() const { return v.is_bottom() || minus.is_bottom() || plus.is_bottom(); }

  // x := y + [c, d] where y is this value.
  ClockedValue shift(const IntInterval& c) const;
  ClockedValue tick() const;
  // Tightest value of x implied by the three components.
  IntInterval reduce(const IntInterval& clock) const;
  // Reduces all components against each other.
  ClockedValue normalized(const IntInterval& clock) const;
  // Meets with a refined plain value.
  ClockedValue refine(const IntInterval& nv, const IntInterval& clock) const;

  ClockedValue join(const ClockedValue& o) const;
  ClockedValue widen(const ClockedValue& o, const ThresholdSet& t) const;
  ClockedValue narrow(const ClockedValue& o, const ThresholdSet& t) const;
  bool leq(const ClockedValue& o) const;
  bool operator==(const ClockedValue& o) const { return v == o.v && minus == o.minus && plus == o.plus; }
  std::string to_string() const;
};

}  // namespace miniastree
