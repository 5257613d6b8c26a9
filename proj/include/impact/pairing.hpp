#pragma once

#include <cstdint>
#include <vector>

#include "impact/order_book.hpp"

namespace impact {

/*
 * Event-time pairing of one stock's trades with another stock's quotes.
 *
 * For a trade of stock j at millisecond t, the price history of stock i
 * contributes:
 *   previous midpoint  m_p : last two-sided quote of i with t_quote <= t - 1
 *   following midpoint m_f : first two-sided quote of i with t_quote >= t + 1
 * Quotes stamped at exactly the trade millisecond are invisible to the
 * pairing. Trades lacking either side produce no observation.
 *
 * Trades of j that map to the *identical* (previous, following) quote pair of
 * i are "multiple" — their shared price move cannot be attributed to a
 * single trade; all remaining paired trades are "single".
 */

enum class TradeCase : std::uint8_t { single, multiple };

// Midpoint tape entry: time plus twice the midpoint in 1/10000 dollar units.
struct MidPoint {
    std::int64_t t_ms = 0;
    std::int64_t mid_x2 = 0;
};

// Extracts the midpoint tape from a quote tape (two-sided records only).
std::vector<MidPoint> midpoint_series(const std::vector<QuoteRecord>& quotes);

// Indices into a midpoint tape; -1 when the side is missing.
struct QuotePair {
    std::ptrdiff_t prev = -1;
    std::ptrdiff_t foll = -1;

    bool valid() const { return prev >= 0 && foll >= 0; }
    friend bool operator==(const QuotePair&, const QuotePair&) = default;
};

// Binary-search pairing of one trade time against a midpoint tape sorted by
// time (ties keep tape order; the last quote of a millisecond wins for prev,
// the first one for foll).
QuotePair pair_trade(const std::vector<MidPoint>& mids, std::int64_t t_trade);

struct PairedObservation {
    int impacted = 0;  // i: the stock whose price reacts
    int impacting = 0; // j: the stock that traded
    std::int64_t t_ms = 0;
    int sign = 0;
    double log_return = 0.0; // log m_f - log m_p
    TradeCase trade_case = TradeCase::single;
};

// Pairs and classifies every trade of j against i's midpoint tape. Trades
// must be sorted by time and millisecond-deduplicated.
std::vector<PairedObservation> observations_for_pair(const std::vector<MidPoint>& mids_i,
                                                     const std::vector<TradeEvent>& trades_j,
                                                     int impacted, int impacting);

} // namespace impact
