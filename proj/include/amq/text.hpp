#pragma once

#include <string>
#include <string_view>

namespace amq {

/// Lowercases ASCII A-Z only; other bytes pass through.
std::string ascii_lower(std::string_view s);

/// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

/// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD so the
/// result length is still well defined.
std::u32string utf8_decode(std::string_view s);

}  // namespace amq
