#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "impact/order_book.hpp"

namespace impact {

/*
 * Per-stock quote and trade tapes produced by replaying a message stream
 * through the order book.
 */
struct StockSeries {
    std::string symbol;
    std::vector<QuoteRecord> quotes;
    std::vector<TradeEvent> trades;
};

struct ReconstructResult {
    std::map<std::string, StockSeries> by_stock;
    std::size_t n_messages = 0;
    std::size_t n_skipped = 0; // X/T messages
};

// Replays messages (one book per stock). Messages must be non-decreasing in
// time within each stock's stream; stream-integrity violations throw
// StreamError annotated with the 1-based message index.
ReconstructResult reconstruct(std::span<const ItchMessage> messages);

// Keeps only events with start_ms <= t_ms <= end_ms (inclusive bounds).
void filter_session(StockSeries& series, std::int64_t start_ms, std::int64_t end_ms);

/*
 * Millisecond de-duplication: any millisecond containing two or more trades
 * of the same stock is ambiguous at tape resolution, so every trade in such
 * a millisecond is removed.
 */
struct DedupeStats {
    std::size_t removed = 0;
    std::size_t total = 0;

    double excluded_fraction() const {
        return total == 0 ? 0.0 : static_cast<double>(removed) / static_cast<double>(total);
    }
};

DedupeStats dedupe_millisecond_trades(std::vector<TradeEvent>& trades);

} // namespace impact
