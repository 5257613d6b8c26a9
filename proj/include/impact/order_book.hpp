#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>

#include "impact/itch.hpp"
#include "impact/prices.hpp"

namespace impact {

/*
 * Best-quote record. A record is appended to the quote tape every time the
 * quadruple (best bid price, best bid volume, best ask price, best ask
 * volume) changes. One-sided states are recorded with the empty side's
 * price/volume at zero; the midpoint — and therefore response pairing — is
 * only defined for two-sided records.
 */
struct QuoteRecord {
    std::int64_t t_ms = 0;
    Price4 bid = 0;
    Price4 ask = 0;
    std::int64_t bid_vol = 0;
    std::int64_t ask_vol = 0;

    bool has_bid() const { return bid_vol > 0; }
    bool has_ask() const { return ask_vol > 0; }
    bool two_sided() const { return has_bid() && has_ask(); }

    // Twice the midpoint in 1/10000 dollar units (exact integer).
    std::int64_t mid_x2() const { return bid + ask; }
    double midpoint_dollars() const {
        return static_cast<double>(mid_x2()) / (2.0 * price4_per_dollar);
    }

    friend bool operator==(const QuoteRecord&, const QuoteRecord&) = default;
};

/*
 * One trade at millisecond resolution. The sign is the market-order side:
 * +1 when a resting sell limit order was executed (buyer-initiated), -1 when
 * a resting buy limit order was executed (seller-initiated).
 */
struct TradeEvent {
    std::int64_t t_ms = 0;
    Price4 price = 0;
    std::int64_t volume = 0;
    int sign = 0;

    friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

/*
 * Limit-order book for a single stock, driven by id-addressed messages.
 * Executions and cancels name the order they act on, so no matching logic is
 * required; the book tracks per-order remaining volume and per-level
 * aggregates, and reports best-quote changes.
 *
 * Integrity rules enforced here (violations throw StreamError):
 *   - submissions use strictly increasing order ids,
 *   - a buy submission must price strictly below the best ask (and the
 *     mirror rule for sells): crossed submissions are rejected,
 *   - C/E volumes must not exceed the referenced order's remaining volume,
 *   - C/D/E/F must reference a live order id.
 */
class OrderBookState {
public:
    struct ApplyResult {
        std::optional<TradeEvent> trade;
        std::optional<QuoteRecord> quote;
    };

    // Applies one message. X/T messages are no-ops. The message's side field
    // is filled in for reference types (C/D/E/F).
    ApplyResult apply(ItchMessage& msg);

    bool has_bid() const { return !bids_.empty(); }
    bool has_ask() const { return !asks_.empty(); }
    Price4 best_bid() const { return bids_.begin()->first; }
    Price4 best_ask() const { return asks_.begin()->first; }
    std::size_t open_orders() const { return orders_.size(); }

private:
    struct Level {
        std::int64_t total_volume = 0;
        std::int64_t order_count = 0;
    };
    struct OrderRef {
        Side side = Side::none;
        Price4 price = 0;
        std::int64_t remaining = 0;
    };

    using BidMap = std::map<Price4, Level, std::greater<Price4>>;
    using AskMap = std::map<Price4, Level, std::less<Price4>>;

    BidMap bids_;
    AskMap asks_;
    std::unordered_map<std::uint64_t, OrderRef> orders_;
    std::uint64_t last_submission_id_ = 0;
    bool any_submission_ = false;

    // Last reported quadruple; (0,0,0,0) means "nothing reported yet or
    // fully empty book".
    QuoteRecord last_reported_{};

    OrderRef& find_order(const ItchMessage& msg);
    void reduce_order(std::uint64_t id, OrderRef& ref, std::int64_t volume);
    std::optional<QuoteRecord> quote_if_changed(std::int64_t t_ms);
};

} // namespace impact
