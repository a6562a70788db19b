#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace amq {

enum class ErrorKind {
    Parse,                 // malformed input text (CSV, JSON, flag syntax)
    Validation,            // well-formed input that breaks a domain rule
    Input,                 // bad argument to an operation
    Provider,              // embedding provider / transport failure
    Format,                // corrupt binary cache
    UndefinedCorrelation,  // Pearson with zero variance
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. The kind drives CLI exit codes and
/// HTTP status mapping; the optional fields carry location detail.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> line() const noexcept { return line_; }
    std::optional<std::uint64_t> offset() const noexcept { return offset_; }
    std::optional<int> status() const noexcept { return status_; }

    /// Same error with "context: " prepended to the message.
    Error with_context(std::string_view context) const;

    Error& set_line(std::size_t line) noexcept { line_ = line; return *this; }
    Error& set_offset(std::uint64_t offset) noexcept { offset_ = offset; return *this; }
    Error& set_status(int status) noexcept { status_ = status; return *this; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> line_;
    std::optional<std::uint64_t> offset_;
    std::optional<int> status_;
};

Error parse_error(std::size_t line, std::string_view message);
Error validation_error(std::string_view message);
Error input_error(std::string_view message);
Error provider_error(std::string_view message, std::optional<int> status = std::nullopt);
Error format_error(std::uint64_t offset, std::string_view message);

}  // namespace amq
