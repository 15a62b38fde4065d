#pragma once

#include <cmath>
#include <compare>
#include <cstdint>

namespace splitsea {

/// A point of Z + 1/2, stored as its floor: Site{i} is i + 1/2.
struct Site {
  std::int64_t index = 0;

  constexpr double value() const noexcept { return static_cast<double>(index) + 0.5; }

  /// Site nearest to a half-integer value (rounds x - 1/2).
  static Site from_value(double x) {
    return Site{static_cast<std::int64_t>(std::llround(x - 0.5))};
  }

  friend constexpr auto operator<=>(Site, Site) = default;
  friend constexpr Site operator+(Site s, std::int64_t n) { return Site{s.index + n}; }
  friend constexpr Site operator-(Site s, std::int64_t n) { return Site{s.index - n}; }
  /// k - l for two half-integers is an integer.
  friend constexpr std::int64_t operator-(Site a, Site b) { return a.index - b.index; }
};

} // namespace splitsea
