#include "doctest.h"

#include <random>

#include "impact/errors.hpp"
#include "impact/itch.hpp"

using namespace impact;

TEST_CASE("submission line parses into its six fields") {
    const ItchMessage msg = parse_message_line("17,B,5,10.00,100,ABC");
    CHECK(msg.t_ms == 17);
    CHECK(msg.type == MsgType::submit_buy);
    CHECK(msg.order_id == 5);
    CHECK(msg.price == 100000);
    CHECK(msg.volume == 100);
    CHECK(msg.stock == "ABC");
    CHECK(msg.side == Side::buy);
}

TEST_CASE("partial execution parses with an empty price field") {
    const ItchMessage msg = parse_message_line("18,E,5,,40,ABC");
    CHECK(msg.type == MsgType::execute_part);
    CHECK(msg.order_id == 5);
    CHECK(msg.volume == 40);
    CHECK(msg.side == Side::none);
}

TEST_CASE("cross and hidden trades are recognized but flagged as skipped") {
    const ItchMessage x = parse_message_line("19,X,9,,10,ABC");
    CHECK(x.type == MsgType::cross_trade);
    CHECK(is_skipped(x.type));
    const ItchMessage t = parse_message_line("19,T,9,,10,ABC");
    CHECK(is_skipped(t.type));
    CHECK_FALSE(is_skipped(MsgType::execute_part));
}

TEST_CASE("malformed lines are rejected with the line number") {
    CHECK_THROWS_AS(parse_message_line("17,banana,5,10.00,100,ABC", 3), ParseError);
    CHECK_THROWS_WITH_AS(parse_message_line("17,banana,5,10.00,100,ABC", 3),
                         doctest::Contains("line 3"), ParseError);
    // wrong arity
    CHECK_THROWS_AS(parse_message_line("17,B,5,10.00,100"), ParseError);
    CHECK_THROWS_AS(parse_message_line("17,B,5,10.00,100,ABC,extra"), ParseError);
    // bad numbers
    CHECK_THROWS_AS(parse_message_line("x,B,5,10.00,100,ABC"), ParseError);
    CHECK_THROWS_AS(parse_message_line("17,B,zz,10.00,100,ABC"), ParseError);
    CHECK_THROWS_AS(parse_message_line("17,B,5,10.00,-3,ABC"), ParseError);
    // missing mandatory price / forbidden price
    CHECK_THROWS_AS(parse_message_line("17,B,5,,100,ABC"), ParseError);
    CHECK_THROWS_AS(parse_message_line("17,E,5,10.00,40,ABC"), ParseError);
    // full cancel/execution act on the whole remaining volume: no volume field
    CHECK_THROWS_AS(parse_message_line("17,F,5,,40,ABC"), ParseError);
    CHECK_THROWS_AS(parse_message_line("17,D,5,,40,ABC"), ParseError);
    // empty symbol
    CHECK_THROWS_AS(parse_message_line("17,B,5,10.00,100,"), ParseError);
}

TEST_CASE("serialize(parse(line)) == line for canonical lines") {
    const char* lines[] = {
        "17,B,5,10.00,100,ABC",  "18,E,5,,40,ABC",   "19,X,9,,10,ABC",
        "21,S,6,10.1234,5,QQQ",  "30,D,5,,,ABC",     "41,F,6,,,QQQ",
        "55,C,7,,25,ZY",
    };
    for (const char* line : lines) {
        CHECK(serialize_message(parse_message_line(line)) == line);
    }
}

TEST_CASE("round-trip property over generated canonical messages") {
    std::mt19937_64 rng(20260815);
    std::uniform_int_distribution<int> type_pick(0, 7);
    std::uniform_int_distribution<std::int64_t> t_pick(0, 86'399'999);
    std::uniform_int_distribution<std::int64_t> px_pick(1, 9'999'999);
    std::uniform_int_distribution<std::int64_t> vol_pick(1, 1'000'000);
    const char types[] = {'B', 'S', 'C', 'D', 'E', 'F', 'X', 'T'};

    for (int trial = 0; trial < 2000; ++trial) {
        const char type = types[type_pick(rng)];
        ItchMessage msg;
        msg.t_ms = t_pick(rng);
        msg.type = static_cast<MsgType>(type);
        msg.order_id = static_cast<std::uint64_t>(vol_pick(rng));
        msg.stock = "TST";
        if (type == 'B' || type == 'S') {
            msg.price = px_pick(rng);
            msg.side = type == 'B' ? Side::buy : Side::sell;
        }
        if (type == 'B' || type == 'S' || type == 'C' || type == 'E') {
            msg.volume = vol_pick(rng);
        }
        const std::string line = serialize_message(msg);
        const ItchMessage parsed = parse_message_line(line);
        CHECK(serialize_message(parsed) == line);
        CHECK(parsed.t_ms == msg.t_ms);
        CHECK(parsed.type == msg.type);
        CHECK(parsed.order_id == msg.order_id);
        CHECK(parsed.price == msg.price);
        CHECK(parsed.volume == msg.volume);
        CHECK(parsed.stock == msg.stock);
    }
}
