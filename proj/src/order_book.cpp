#include "impact/order_book.hpp"

#include "impact/errors.hpp"

namespace impact {

namespace {

[[noreturn]] void integrity_fail(const ItchMessage& msg, const std::string& what) {
    throw StreamError("stock " + msg.stock + ", t=" + std::to_string(msg.t_ms) +
                      ", order " + std::to_string(msg.order_id) + ": " + what);
}

} // namespace

OrderBookState::OrderRef& OrderBookState::find_order(const ItchMessage& msg) {
    auto it = orders_.find(msg.order_id);
    if (it == orders_.end()) {
        integrity_fail(msg, "reference to unknown or closed order id");
    }
    return it->second;
}

void OrderBookState::reduce_order(std::uint64_t id, OrderRef& ref, std::int64_t volume) {
    auto update = [&](auto& levels) {
        auto level_it = levels.find(ref.price);
        level_it->second.total_volume -= volume;
        ref.remaining -= volume;
        if (ref.remaining == 0) {
            level_it->second.order_count -= 1;
            if (level_it->second.order_count == 0) {
                levels.erase(level_it);
            }
            orders_.erase(id);
        }
    };
    if (ref.side == Side::buy) {
        update(bids_);
    } else {
        update(asks_);
    }
}

std::optional<QuoteRecord> OrderBookState::quote_if_changed(std::int64_t t_ms) {
    QuoteRecord now;
    now.t_ms = t_ms;
    if (!bids_.empty()) {
        now.bid = bids_.begin()->first;
        now.bid_vol = bids_.begin()->second.total_volume;
    }
    if (!asks_.empty()) {
        now.ask = asks_.begin()->first;
        now.ask_vol = asks_.begin()->second.total_volume;
    }

    const bool changed = now.bid != last_reported_.bid || now.ask != last_reported_.ask ||
                         now.bid_vol != last_reported_.bid_vol || now.ask_vol != last_reported_.ask_vol;
    if (!changed) {
        return std::nullopt;
    }
    last_reported_ = now;
    last_reported_.t_ms = 0; // comparisons above ignore time; keep a neutral stamp
    if (!now.has_bid() && !now.has_ask()) {
        // A fully empty book has nothing to report, but the state is
        // remembered so the next resting order re-triggers a record.
        return std::nullopt;
    }
    return now;
}

OrderBookState::ApplyResult OrderBookState::apply(ItchMessage& msg) {
    ApplyResult result;
    if (is_skipped(msg.type)) {
        return result;
    }

    switch (msg.type) {
    case MsgType::submit_buy:
    case MsgType::submit_sell: {
        if (any_submission_ && msg.order_id <= last_submission_id_) {
            integrity_fail(msg, "submission ids must be strictly increasing");
        }
        if (orders_.count(msg.order_id) != 0) {
            integrity_fail(msg, "duplicate order id");
        }
        if (msg.type == MsgType::submit_buy) {
            if (!asks_.empty() && msg.price >= best_ask()) {
                integrity_fail(msg, "buy submission crosses the best ask");
            }
            auto& level = bids_[msg.price];
            level.total_volume += msg.volume;
            level.order_count += 1;
        } else {
            if (!bids_.empty() && msg.price <= best_bid()) {
                integrity_fail(msg, "sell submission crosses the best bid");
            }
            auto& level = asks_[msg.price];
            level.total_volume += msg.volume;
            level.order_count += 1;
        }
        orders_[msg.order_id] = OrderRef{msg.side, msg.price, msg.volume};
        any_submission_ = true;
        last_submission_id_ = msg.order_id;
        break;
    }
    case MsgType::cancel_part: {
        OrderRef& ref = find_order(msg);
        msg.side = ref.side;
        if (msg.volume > ref.remaining) {
            integrity_fail(msg, "cancel volume exceeds remaining volume");
        }
        reduce_order(msg.order_id, ref, msg.volume);
        break;
    }
    case MsgType::cancel_full: {
        OrderRef& ref = find_order(msg);
        msg.side = ref.side;
        reduce_order(msg.order_id, ref, ref.remaining);
        break;
    }
    case MsgType::execute_part: {
        OrderRef& ref = find_order(msg);
        msg.side = ref.side;
        if (msg.volume > ref.remaining) {
            integrity_fail(msg, "execution volume exceeds remaining volume");
        }
        // A market buy hits a resting sell: executed sell limit => sign +1.
        result.trade = TradeEvent{msg.t_ms, ref.price, msg.volume, ref.side == Side::sell ? +1 : -1};
        reduce_order(msg.order_id, ref, msg.volume);
        break;
    }
    case MsgType::execute_full: {
        OrderRef& ref = find_order(msg);
        msg.side = ref.side;
        result.trade = TradeEvent{msg.t_ms, ref.price, ref.remaining, ref.side == Side::sell ? +1 : -1};
        reduce_order(msg.order_id, ref, ref.remaining);
        break;
    }
    default:
        break;
    }

    result.quote = quote_if_changed(msg.t_ms);
    return result;
}

} // namespace impact
