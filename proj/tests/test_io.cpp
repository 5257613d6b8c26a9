#include "doctest.h"

#include <cmath>
#include <limits>

#include "impact/errors.hpp"
#include "impact/io.hpp"
#include "test_util.hpp"

using namespace impact;

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-6) == "-2.5e-06");
    for (double v : {1.0 / 3.0, 9.995e-4, 0.7071067811865476, 1e300, -0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("labeled matrices round-trip through CSV, empty fields meaning missing") {
    testutil::TempDir tmp;
    const std::vector<std::string> symbols = {"AAA", "BBB", "CCC"};
    Eigen::MatrixXd m(3, 3);
    m << 1.5, -2.25e-6, 0.0,
         std::numeric_limits<double>::quiet_NaN(), 4.0, 5.5,
         7.0, 8.0, std::numeric_limits<double>::quiet_NaN();

    const auto path = tmp.path / "matrix.csv";
    write_matrix_csv(path, m, symbols);
    const auto loaded = read_matrix_csv(path);

    CHECK(loaded.symbols == symbols);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (std::isnan(m(i, j))) {
                CHECK(std::isnan(loaded.values(i, j)));
            } else {
                CHECK(loaded.values(i, j) == m(i, j));
            }
        }
    }

    // missing cells serialize as genuinely empty fields
    const std::string text = read_text_file(path);
    CHECK(text.find("BBB,,4,5.5") != std::string::npos);
}

TEST_CASE("matrix reader rejects shape and label mismatches") {
    testutil::TempDir tmp;
    const auto path = tmp.path / "bad.csv";
    write_text_file(path, "symbol,AAA,BBB\nAAA,1,2\n");
    CHECK_THROWS_AS(read_matrix_csv(path), ParseError);
    write_text_file(path, "symbol,AAA,BBB\nZZZ,1,2\nBBB,3,4\n");
    CHECK_THROWS_AS(read_matrix_csv(path), ParseError);
}

TEST_CASE("metadata rows round-trip") {
    testutil::TempDir tmp;
    const std::vector<StockMeta> meta = {
        {1, "AAL", 4022, 31000, 0.0132},
        {2, "AAPL", 13598, 150000, 0.0105},
    };
    const auto path = tmp.path / "meta.csv";
    write_metadata_csv(path, meta);
    const auto loaded = read_metadata_csv(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[1].symbol == "AAPL");
    CHECK(loaded[1].n_trades == 13598);
    CHECK(loaded[0].mean_spread_dollars == 0.0132);
}

TEST_CASE("message CSV reader honors the header flag and skips blank lines") {
    testutil::TempDir tmp;
    const auto path = tmp.path / "messages.csv";
    write_text_file(path, "timestamp_ms,msg_type,order_id,price,volume,stock\n"
                          "1,B,1,10.00,100,ABC\n\n2,S,2,10.10,50,ABC\n");
    const auto messages = read_messages_csv(path, true);
    REQUIRE(messages.size() == 2);
    CHECK(messages[0].type == MsgType::submit_buy);
    CHECK(messages[1].t_ms == 2);

    // without the flag the header line must fail loudly
    CHECK_THROWS_AS(read_messages_csv(path, false), ParseError);
}
