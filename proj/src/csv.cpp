#include "amq/csv.hpp"

#include "amq/error.hpp"

namespace amq::csv {

std::vector<Record> parse(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<Record> records;
    Record current;
    std::string field;
    std::size_t line = 1;
    current.line = 1;
    bool in_quotes = false;
    bool after_quote = false;   // just closed a quoted field
    bool field_started = false; // anything seen for the current record

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
    };
    auto end_record = [&] {
        if (field_started) {
            end_field();
            records.push_back(std::move(current));
        }
        current = Record{};
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == ',') {
            field_started = true;
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
            ++line;
            current.line = line;
        } else if (after_quote) {
            throw parse_error(line, "unexpected character after closing quote");
        } else if (c == '"') {
            if (!field.empty()) throw parse_error(line, "quote inside unquoted field");
            in_quotes = true;
            field_started = true;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw parse_error(current.line, "unterminated quoted field");
    end_record();
    return records;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    out.push_back('\n');
    return out;
}

}  // namespace amq::csv
