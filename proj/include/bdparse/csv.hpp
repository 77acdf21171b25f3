#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace bdparse::csv {

using Row = std::vector<std::string>;

/// Quotes the field when it contains a comma, quote, CR or LF; embedded quotes are doubled.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const Row& row);

/// RFC 4180 reader; quoted fields may span lines. Accepts LF or CRLF.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// False at end of input. Throws bdparse::Error on an unterminated quote.
    bool next(Row& row);
    /// 1-based physical line where the last returned record started.
    std::size_t line() const { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
};

struct Table {
    Row header;
    std::vector<Row> rows;

    std::optional<std::size_t> column(std::string_view name) const;
};

Table read_table(std::istream& in);

}  // namespace bdparse::csv
