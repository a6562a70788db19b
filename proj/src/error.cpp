#include "amq/error.hpp"

namespace amq {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::Validation: return "validation error";
        case ErrorKind::Input: return "input error";
        case ErrorKind::Provider: return "provider error";
        case ErrorKind::Format: return "format error";
        case ErrorKind::UndefinedCorrelation: return "undefined correlation";
    }
    return "error";
}

Error::Error(ErrorKind kind, std::string message)
    : std::runtime_error(std::move(message)), kind_(kind) {}

Error Error::with_context(std::string_view context) const {
    Error e(kind_, std::string(context) + ": " + what());
    e.line_ = line_;
    e.offset_ = offset_;
    e.status_ = status_;
    return e;
}

Error parse_error(std::size_t line, std::string_view message) {
    Error e(ErrorKind::Parse, "line " + std::to_string(line) + ": " + std::string(message));
    e.set_line(line);
    return e;
}

Error validation_error(std::string_view message) {
    return Error(ErrorKind::Validation, std::string(message));
}

Error input_error(std::string_view message) {
    return Error(ErrorKind::Input, std::string(message));
}

Error provider_error(std::string_view message, std::optional<int> status) {
    std::string msg(message);
    if (status) msg += " (status " + std::to_string(*status) + ")";
    Error e(ErrorKind::Provider, std::move(msg));
    if (status) e.set_status(*status);
    return e;
}

Error format_error(std::uint64_t offset, std::string_view message) {
    Error e(ErrorKind::Format, std::string(message) + " at byte offset " + std::to_string(offset));
    e.set_offset(offset);
    return e;
}

}  // namespace amq
