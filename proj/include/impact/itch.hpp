#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "impact/prices.hpp"

namespace impact {

/*
 * ITCH-style order-flow messages, one per CSV line:
 *
 *     timestamp_ms,msg_type,order_id,price,volume,stock
 *
 *  B  limit buy submission        price and volume required
 *  S  limit sell submission       price and volume required
 *  C  partial cancel              price empty, volume = shares removed
 *  D  full cancel                 price and volume empty
 *  E  partial execution           price empty, volume = shares executed
 *  F  full execution              price and volume empty
 *  X  cross trade                 recognized and skipped
 *  T  non-displayed trade         recognized and skipped
 *
 * C/D/E/F reference the order_id of a prior submission; the referenced
 * order's side and price are resolved by the book at apply time.
 */

enum class MsgType : char {
    submit_buy   = 'B',
    submit_sell  = 'S',
    cancel_part  = 'C',
    cancel_full  = 'D',
    execute_part = 'E',
    execute_full = 'F',
    cross_trade  = 'X',
    hidden_trade = 'T',
};

enum class Side : std::uint8_t { buy, sell, none };

// True for message types that are recognized but carry no book semantics.
inline bool is_skipped(MsgType type) {
    return type == MsgType::cross_trade || type == MsgType::hidden_trade;
}

// True for message types that reference an existing order id.
inline bool references_order(MsgType type) {
    switch (type) {
    case MsgType::cancel_part:
    case MsgType::cancel_full:
    case MsgType::execute_part:
    case MsgType::execute_full:
        return true;
    default:
        return false;
    }
}

struct ItchMessage {
    std::int64_t t_ms = 0;
    MsgType type = MsgType::submit_buy;
    std::uint64_t order_id = 0;
    Price4 price = 0;        // meaningful for B/S only
    std::int64_t volume = 0; // 0 for D/F; optional for X/T
    std::string stock;
    // Side of the order this message acts on: set at parse time for B/S,
    // filled in from the referenced order when the book applies C/D/E/F.
    Side side = Side::none;
};

// Parses one CSV line. line_no is used in error messages (1-based; 0 = unknown).
ItchMessage parse_message_line(std::string_view line, std::size_t line_no = 0);

// Canonical CSV form; serialize_message(parse_message_line(s)) == s for every
// well-formed line with canonical price formatting.
std::string serialize_message(const ItchMessage& msg);

} // namespace impact
