#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace amq::csv {

struct Record {
    std::size_t line = 0;  // 1-based line on which the record starts
    std::vector<std::string> fields;
};

/// RFC 4180 reader: comma separated, double-quote escaping, CRLF or LF line
/// ends, quoted fields may span lines. A leading UTF-8 BOM is skipped and
/// blank lines are ignored. Throws a parse error on an unterminated quote or
/// on stray characters after a closing quote.
std::vector<Record> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace amq::csv
