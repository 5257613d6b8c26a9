#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace impact {

/*
 * Prices are stored as integer counts of 1/10000 dollar, so every quoted
 * price on a normal US equity grid is exact and midpoint arithmetic can be
 * done in integers (twice the midpoint = bid + ask is always integral).
 */
using Price4 = std::int64_t;

inline constexpr Price4 price4_per_dollar = 10'000;

// Parses a decimal dollar price ("10.05", "9", "12.3456") into 1/10000 units.
// At most four fractional digits are accepted. Throws ParseError otherwise.
Price4 parse_price4(std::string_view text);

// Canonical wire format: at least two and at most four fractional digits,
// trailing zeros trimmed down to two ("10.00", "10.005", "12.3456").
std::string format_price4(Price4 price);

// Price in dollars as a double (for exports and plotting only; analysis
// paths keep integer units).
inline double price4_to_dollars(Price4 price) {
    return static_cast<double>(price) / static_cast<double>(price4_per_dollar);
}

} // namespace impact
