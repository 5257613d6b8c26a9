#include "impact/reconstruct.hpp"

#include <algorithm>
#include <unordered_map>

#include "impact/errors.hpp"

namespace impact {

ReconstructResult reconstruct(std::span<const ItchMessage> messages) {
    ReconstructResult result;
    result.n_messages = messages.size();

    std::map<std::string, OrderBookState> books;
    std::map<std::string, std::int64_t> last_t;

    for (std::size_t i = 0; i < messages.size(); ++i) {
        ItchMessage msg = messages[i];

        auto [t_it, t_new] = last_t.try_emplace(msg.stock, msg.t_ms);
        if (!t_new && msg.t_ms < t_it->second) {
            throw StreamError("message " + std::to_string(i + 1) + ": timestamps regress within stock " +
                              msg.stock);
        }
        t_it->second = msg.t_ms;

        if (is_skipped(msg.type)) {
            result.n_skipped += 1;
            continue;
        }

        auto& series = result.by_stock[msg.stock];
        if (series.symbol.empty()) {
            series.symbol = msg.stock;
        }

        OrderBookState::ApplyResult applied;
        try {
            applied = books[msg.stock].apply(msg);
        } catch (const StreamError& e) {
            throw StreamError("message " + std::to_string(i + 1) + ": " + e.what());
        }
        if (applied.trade) {
            series.trades.push_back(*applied.trade);
        }
        if (applied.quote) {
            series.quotes.push_back(*applied.quote);
        }
    }
    return result;
}

void filter_session(StockSeries& series, std::int64_t start_ms, std::int64_t end_ms) {
    auto out_of_window = [&](std::int64_t t) { return t < start_ms || t > end_ms; };
    std::erase_if(series.quotes, [&](const QuoteRecord& q) { return out_of_window(q.t_ms); });
    std::erase_if(series.trades, [&](const TradeEvent& t) { return out_of_window(t.t_ms); });
}

DedupeStats dedupe_millisecond_trades(std::vector<TradeEvent>& trades) {
    DedupeStats stats;
    stats.total = trades.size();

    std::unordered_map<std::int64_t, std::size_t> per_ms;
    per_ms.reserve(trades.size());
    for (const TradeEvent& trade : trades) {
        per_ms[trade.t_ms] += 1;
    }
    std::erase_if(trades, [&](const TradeEvent& t) { return per_ms[t.t_ms] >= 2; });
    stats.removed = stats.total - trades.size();
    return stats;
}

} // namespace impact
