#include "impact/itch.hpp"

#include <array>
#include <charconv>

#include "impact/errors.hpp"

namespace impact {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    if (line_no > 0) {
        throw ParseError("line " + std::to_string(line_no) + ": " + what);
    }
    throw ParseError(what);
}

std::int64_t parse_int(std::string_view field, std::size_t line_no, const char* name) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        fail(line_no, std::string("malformed ") + name + " '" + std::string(field) + "'");
    }
    return value;
}

std::uint64_t parse_uint(std::string_view field, std::size_t line_no, const char* name) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        fail(line_no, std::string("malformed ") + name + " '" + std::string(field) + "'");
    }
    return value;
}

} // namespace

ItchMessage parse_message_line(std::string_view line, std::size_t line_no) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
        line.remove_suffix(1);
    }

    std::array<std::string_view, 6> fields;
    std::size_t n_fields = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            if (n_fields == fields.size()) {
                fail(line_no, "expected 6 comma-separated fields");
            }
            fields[n_fields++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    if (n_fields != fields.size()) {
        fail(line_no, "expected 6 comma-separated fields");
    }

    ItchMessage msg;
    msg.t_ms = parse_int(fields[0], line_no, "timestamp");
    if (msg.t_ms < 0) {
        fail(line_no, "negative timestamp");
    }

    if (fields[1].size() != 1) {
        fail(line_no, "unknown message type '" + std::string(fields[1]) + "'");
    }
    switch (fields[1][0]) {
    case 'B': msg.type = MsgType::submit_buy; msg.side = Side::buy; break;
    case 'S': msg.type = MsgType::submit_sell; msg.side = Side::sell; break;
    case 'C': msg.type = MsgType::cancel_part; break;
    case 'D': msg.type = MsgType::cancel_full; break;
    case 'E': msg.type = MsgType::execute_part; break;
    case 'F': msg.type = MsgType::execute_full; break;
    case 'X': msg.type = MsgType::cross_trade; break;
    case 'T': msg.type = MsgType::hidden_trade; break;
    default:
        fail(line_no, "unknown message type '" + std::string(fields[1]) + "'");
    }

    msg.order_id = parse_uint(fields[2], line_no, "order_id");

    const std::string_view price_field = fields[3];
    const bool is_submission = msg.type == MsgType::submit_buy || msg.type == MsgType::submit_sell;
    if (is_submission) {
        if (price_field.empty()) {
            fail(line_no, "submission without a price");
        }
        try {
            msg.price = parse_price4(price_field);
        } catch (const ParseError& e) {
            fail(line_no, e.what());
        }
        if (msg.price <= 0) {
            fail(line_no, "non-positive price");
        }
    } else if (!price_field.empty()) {
        fail(line_no, "price field must be empty for type '" + std::string(fields[1]) + "'");
    }

    const std::string_view volume_field = fields[4];
    const bool volume_required = is_submission || msg.type == MsgType::cancel_part ||
                                 msg.type == MsgType::execute_part;
    const bool volume_forbidden = msg.type == MsgType::cancel_full || msg.type == MsgType::execute_full;
    if (volume_field.empty()) {
        if (volume_required) {
            fail(line_no, "missing volume for type '" + std::string(fields[1]) + "'");
        }
        msg.volume = 0;
    } else {
        if (volume_forbidden) {
            fail(line_no, "volume field must be empty for type '" + std::string(fields[1]) + "'");
        }
        msg.volume = parse_int(volume_field, line_no, "volume");
        if (msg.volume <= 0) {
            fail(line_no, "non-positive volume");
        }
    }

    if (fields[5].empty()) {
        fail(line_no, "empty stock symbol");
    }
    msg.stock = std::string(fields[5]);
    return msg;
}

std::string serialize_message(const ItchMessage& msg) {
    std::string out = std::to_string(msg.t_ms);
    out.push_back(',');
    out.push_back(static_cast<char>(msg.type));
    out.push_back(',');
    out += std::to_string(msg.order_id);
    out.push_back(',');
    if (msg.type == MsgType::submit_buy || msg.type == MsgType::submit_sell) {
        out += format_price4(msg.price);
    }
    out.push_back(',');
    if (msg.volume > 0 && msg.type != MsgType::cancel_full && msg.type != MsgType::execute_full) {
        out += std::to_string(msg.volume);
    }
    out.push_back(',');
    out += msg.stock;
    return out;
}

} // namespace impact
