#include "impact/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "impact/errors.hpp"
#include "impact/prices.hpp"

namespace impact {

namespace {

std::int64_t to_int(const std::string& field, const std::filesystem::path& path, std::size_t line_no) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed integer '" + field +
                         "'");
    }
    return value;
}

double to_double(const std::string& field, const std::filesystem::path& path, std::size_t line_no) {
    try {
        std::size_t used = 0;
        double value = std::stod(field, &used);
        if (used != field.size()) {
            throw std::invalid_argument(field);
        }
        return value;
    } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": malformed number '" + field +
                         "'");
    }
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ValidationError("cannot open for writing: " + path.string());
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open for reading: " + path.string());
    }
    return in;
}

} // namespace

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) {
        throw NumericError("double formatting failed");
    }
    return std::string(buffer, ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty()) {
        std::string& last = fields.back();
        while (!last.empty() && (last.back() == '\n' || last.back() == '\r')) {
            last.pop_back();
        }
    }
    return fields;
}

// ---- message streams -------------------------------------------------------

std::vector<ItchMessage> read_messages_csv(const std::filesystem::path& path, bool has_header) {
    auto in = open_in(path);
    std::vector<ItchMessage> messages;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && has_header) {
            continue;
        }
        if (line.empty() || line == "\r") {
            continue;
        }
        messages.push_back(parse_message_line(line, line_no));
    }
    return messages;
}

void write_messages_csv(const std::filesystem::path& path, const std::vector<ItchMessage>& messages,
                        bool with_header) {
    auto out = open_out(path);
    if (with_header) {
        out << "timestamp_ms,msg_type,order_id,price,volume,stock\n";
    }
    for (const ItchMessage& msg : messages) {
        out << serialize_message(msg) << '\n';
    }
}

// ---- per-stock tapes -------------------------------------------------------

void write_quotes_csv(const std::filesystem::path& path, const std::vector<QuoteRecord>& quotes) {
    auto out = open_out(path);
    out << "t_ms,bid,ask,bid_vol,ask_vol\n";
    for (const QuoteRecord& q : quotes) {
        out << q.t_ms << ',';
        if (q.has_bid()) {
            out << format_price4(q.bid);
        }
        out << ',';
        if (q.has_ask()) {
            out << format_price4(q.ask);
        }
        out << ',';
        if (q.has_bid()) {
            out << q.bid_vol;
        }
        out << ',';
        if (q.has_ask()) {
            out << q.ask_vol;
        }
        out << '\n';
    }
}

std::vector<QuoteRecord> read_quotes_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<QuoteRecord> quotes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty() || line == "\r") {
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != 5) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
        }
        QuoteRecord q;
        q.t_ms = to_int(fields[0], path, line_no);
        if (!fields[1].empty()) {
            q.bid = parse_price4(fields[1]);
            q.bid_vol = to_int(fields[3], path, line_no);
        }
        if (!fields[2].empty()) {
            q.ask = parse_price4(fields[2]);
            q.ask_vol = to_int(fields[4], path, line_no);
        }
        quotes.push_back(q);
    }
    return quotes;
}

void write_trades_csv(const std::filesystem::path& path, const std::vector<TradeEvent>& trades) {
    auto out = open_out(path);
    out << "t_ms,price,volume,sign\n";
    for (const TradeEvent& t : trades) {
        out << t.t_ms << ',' << format_price4(t.price) << ',' << t.volume << ',' << t.sign << '\n';
    }
}

std::vector<TradeEvent> read_trades_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<TradeEvent> trades;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty() || line == "\r") {
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != 4) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
        }
        TradeEvent t;
        t.t_ms = to_int(fields[0], path, line_no);
        t.price = parse_price4(fields[1]);
        t.volume = to_int(fields[2], path, line_no);
        t.sign = static_cast<int>(to_int(fields[3], path, line_no));
        if (t.sign != 1 && t.sign != -1) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": trade sign must be +-1");
        }
        trades.push_back(t);
    }
    return trades;
}

// ---- stock universe metadata ----------------------------------------------

void write_metadata_csv(const std::filesystem::path& path, const std::vector<StockMeta>& meta) {
    auto out = open_out(path);
    out << "index,symbol,n_trades,n_quotes,spread\n";
    for (const StockMeta& m : meta) {
        out << m.index << ',' << m.symbol << ',' << m.n_trades << ',' << m.n_quotes << ','
            << format_double(m.mean_spread_dollars) << '\n';
    }
}

std::vector<StockMeta> read_metadata_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<StockMeta> metas;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty() || line == "\r") {
            continue;
        }
        auto fields = split_csv(line);
        if (fields.size() != 5) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
        }
        StockMeta m;
        m.index = static_cast<int>(to_int(fields[0], path, line_no));
        m.symbol = fields[1];
        m.n_trades = to_int(fields[2], path, line_no);
        m.n_quotes = to_int(fields[3], path, line_no);
        m.mean_spread_dollars = to_double(fields[4], path, line_no);
        metas.push_back(m);
    }
    return metas;
}

// ---- labeled square matrices ----------------------------------------------

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix,
                      const std::vector<std::string>& symbols) {
    if (matrix.rows() != matrix.cols() ||
        static_cast<std::size_t>(matrix.rows()) != symbols.size()) {
        throw DimensionError("matrix/symbol size mismatch writing " + path.string());
    }
    auto out = open_out(path);
    out << "symbol";
    for (const auto& s : symbols) {
        out << ',' << s;
    }
    out << '\n';
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        out << symbols[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
            out << ',';
            if (!std::isnan(matrix(i, j))) {
                out << format_double(matrix(i, j));
            }
        }
        out << '\n';
    }
}

LabeledMatrix read_matrix_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(path.string() + ": empty matrix file");
    }
    auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "symbol") {
        throw ParseError(path.string() + ": malformed matrix header");
    }
    LabeledMatrix result;
    result.symbols.assign(header.begin() + 1, header.end());
    const auto n = static_cast<Eigen::Index>(result.symbols.size());
    result.values.setConstant(n, n, std::numeric_limits<double>::quiet_NaN());

    std::size_t line_no = 1;
    Eigen::Index row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        if (row >= n) {
            throw ParseError(path.string() + ": more rows than header symbols");
        }
        auto fields = split_csv(line);
        if (fields.size() != result.symbols.size() + 1) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": wrong field count");
        }
        if (fields[0] != result.symbols[static_cast<std::size_t>(row)]) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": row label mismatch");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            const std::string& field = fields[static_cast<std::size_t>(j) + 1];
            if (!field.empty()) {
                result.values(row, j) = to_double(field, path, line_no);
            }
        }
        ++row;
    }
    if (row != n) {
        throw ParseError(path.string() + ": fewer rows than header symbols");
    }
    return result;
}

// ---- small helpers ---------------------------------------------------------

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    auto out = open_out(path);
    out << content;
}

std::string read_text_file(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace impact
