#include "impact/prices.hpp"

#include <charconv>

#include "impact/errors.hpp"

namespace impact {

Price4 parse_price4(std::string_view text) {
    if (text.empty()) {
        throw ParseError("empty price field");
    }
    bool negative = false;
    std::string_view rest = text;
    if (rest.front() == '-') {
        negative = true;
        rest.remove_prefix(1);
    }

    const auto dot = rest.find('.');
    std::string_view whole = rest.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : rest.substr(dot + 1);

    if (whole.empty() && frac.empty()) {
        throw ParseError("malformed price '" + std::string(text) + "'");
    }
    if (frac.size() > 4) {
        throw ParseError("price '" + std::string(text) + "' has more than four decimals");
    }

    std::int64_t dollars = 0;
    if (!whole.empty()) {
        auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), dollars);
        if (ec != std::errc{} || ptr != whole.data() + whole.size()) {
            throw ParseError("malformed price '" + std::string(text) + "'");
        }
    }

    std::int64_t sub = 0;
    for (char c : frac) {
        if (c < '0' || c > '9') {
            throw ParseError("malformed price '" + std::string(text) + "'");
        }
        sub = sub * 10 + (c - '0');
    }
    for (std::size_t i = frac.size(); i < 4; ++i) {
        sub *= 10;
    }

    const Price4 value = dollars * price4_per_dollar + sub;
    return negative ? -value : value;
}

std::string format_price4(Price4 price) {
    std::string out;
    if (price < 0) {
        out.push_back('-');
        price = -price;
    }
    out += std::to_string(price / price4_per_dollar);
    std::int64_t sub = price % price4_per_dollar;

    char digits[4];
    for (int i = 3; i >= 0; --i) {
        digits[i] = static_cast<char>('0' + sub % 10);
        sub /= 10;
    }
    int keep = 4;
    while (keep > 2 && digits[keep - 1] == '0') {
        --keep;
    }
    out.push_back('.');
    out.append(digits, digits + keep);
    return out;
}

} // namespace impact
