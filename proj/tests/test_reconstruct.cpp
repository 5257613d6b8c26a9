#include "doctest.h"

#include <filesystem>

#include "impact/errors.hpp"
#include "impact/io.hpp"
#include "impact/reconstruct.hpp"
#include "test_util.hpp"

using namespace impact;

TEST_CASE("golden script reproduces the frozen quote and trade tapes exactly") {
    const auto messages = read_messages_csv(testutil::fixture("golden_messages.csv"), true);
    REQUIRE(messages.size() == 20);

    const auto result = reconstruct(messages);
    CHECK(result.n_messages == 20);
    CHECK(result.n_skipped == 2);
    REQUIRE(result.by_stock.count("ABC") == 1);
    const StockSeries& series = result.by_stock.at("ABC");

    const auto expected_quotes = read_quotes_csv(testutil::fixture("golden_quotes.csv"));
    const auto expected_trades = read_trades_csv(testutil::fixture("golden_trades.csv"));
    CHECK(series.quotes == expected_quotes);
    CHECK(series.trades == expected_trades);

    // The writers must reproduce the frozen fixture files byte for byte.
    testutil::TempDir tmp;
    write_quotes_csv(tmp.path / "quotes_ABC.csv", series.quotes);
    write_trades_csv(tmp.path / "trades_ABC.csv", series.trades);
    CHECK(read_text_file(tmp.path / "quotes_ABC.csv") ==
          read_text_file(testutil::fixture("golden_quotes.csv")));
    CHECK(read_text_file(tmp.path / "trades_ABC.csv") ==
          read_text_file(testutil::fixture("golden_trades.csv")));
}

TEST_CASE("streams of only skipped types produce empty series") {
    std::vector<ItchMessage> messages = {
        parse_message_line("1,X,1,,5,ABC"),
        parse_message_line("2,T,2,,7,ABC"),
    };
    const auto result = reconstruct(messages);
    CHECK(result.n_skipped == 2);
    CHECK(result.by_stock.empty());
}

TEST_CASE("stream errors carry the offending message index") {
    std::vector<ItchMessage> messages = {
        parse_message_line("1,B,1,10.00,100,ABC"),
        parse_message_line("2,E,9,,10,ABC"),
    };
    CHECK_THROWS_WITH_AS(reconstruct(messages), doctest::Contains("message 2"), StreamError);
}

TEST_CASE("timestamps may not regress within a stock") {
    std::vector<ItchMessage> messages = {
        parse_message_line("10,B,1,10.00,100,ABC"),
        parse_message_line("9,S,2,10.10,50,ABC"),
    };
    CHECK_THROWS_AS(reconstruct(messages), StreamError);

    // ...but independent stocks interleave freely.
    std::vector<ItchMessage> ok = {
        parse_message_line("10,B,1,10.00,100,ABC"),
        parse_message_line("4,B,1,20.00,100,XYZ"),
        parse_message_line("10,S,2,10.10,50,ABC"),
    };
    const auto result = reconstruct(ok);
    CHECK(result.by_stock.size() == 2);
}

TEST_CASE("session filter keeps inclusive bounds") {
    StockSeries series;
    series.symbol = "ABC";
    for (std::int64_t t : {5, 10, 20, 30, 35}) {
        series.quotes.push_back(QuoteRecord{t, 100000, 100500, 10, 10});
        series.trades.push_back(TradeEvent{t, 100000, 5, 1});
    }
    filter_session(series, 10, 30);
    REQUIRE(series.quotes.size() == 3);
    REQUIRE(series.trades.size() == 3);
    CHECK(series.quotes.front().t_ms == 10);
    CHECK(series.quotes.back().t_ms == 30);
}

TEST_CASE("millisecond dedupe removes every trade in a contested millisecond") {
    std::vector<TradeEvent> trades = {
        {5, 100000, 10, 1},
        {7, 100000, 10, 1},
        {7, 100500, 5, -1},
        {9, 100000, 10, 1},
    };
    const auto stats = dedupe_millisecond_trades(trades);
    REQUIRE(trades.size() == 2);
    CHECK(trades[0].t_ms == 5);
    CHECK(trades[1].t_ms == 9);
    CHECK(stats.removed == 2);
    CHECK(stats.total == 4);
    CHECK(stats.excluded_fraction() == doctest::Approx(0.5));
}

TEST_CASE("dedupe of an empty tape reports a zero excluded fraction") {
    std::vector<TradeEvent> trades;
    const auto stats = dedupe_millisecond_trades(trades);
    CHECK(stats.excluded_fraction() == 0.0);
    CHECK(trades.empty());
}
