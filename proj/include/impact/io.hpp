#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "impact/itch.hpp"
#include "impact/order_book.hpp"

namespace impact {

/*
 * Text artifacts. All files are LF-terminated CSV with headers. Floating
 * point values are written with shortest round-trip formatting so reruns of
 * the same computation are byte-identical and files re-parse exactly.
 */

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

// Splits one CSV line (no quoting; our formats never embed commas).
std::vector<std::string> split_csv(const std::string& line);

// ---- message streams -------------------------------------------------------

// Reads an ITCH-style message CSV. If has_header is true the first line is
// skipped. Line numbers in errors are 1-based file lines.
std::vector<ItchMessage> read_messages_csv(const std::filesystem::path& path, bool has_header);

void write_messages_csv(const std::filesystem::path& path,
                        const std::vector<ItchMessage>& messages, bool with_header);

// ---- per-stock tapes -------------------------------------------------------

// quotes_<SYM>.csv: t_ms,bid,ask,bid_vol,ask_vol (one-sided rows leave the
// missing side's fields empty).
void write_quotes_csv(const std::filesystem::path& path, const std::vector<QuoteRecord>& quotes);
std::vector<QuoteRecord> read_quotes_csv(const std::filesystem::path& path);

// trades_<SYM>.csv: t_ms,price,volume,sign.
void write_trades_csv(const std::filesystem::path& path, const std::vector<TradeEvent>& trades);
std::vector<TradeEvent> read_trades_csv(const std::filesystem::path& path);

// ---- stock universe metadata ----------------------------------------------

struct StockMeta {
    int index = 0; // 1-based universe index
    std::string symbol;
    std::int64_t n_trades = 0;
    std::int64_t n_quotes = 0;
    double mean_spread_dollars = 0.0;
};

void write_metadata_csv(const std::filesystem::path& path, const std::vector<StockMeta>& meta);
std::vector<StockMeta> read_metadata_csv(const std::filesystem::path& path);

// ---- labeled square matrices ----------------------------------------------

// N x N matrix with a symbol header row and a leading symbol column.
// NaN entries are written as empty fields and read back as NaN.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix,
                      const std::vector<std::string>& symbols);

struct LabeledMatrix {
    std::vector<std::string> symbols;
    Eigen::MatrixXd values;
};

LabeledMatrix read_matrix_csv(const std::filesystem::path& path);

// ---- small helpers ---------------------------------------------------------

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

} // namespace impact
