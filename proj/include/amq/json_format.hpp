#pragma once

#include <cstdio>
#include <string>
#include <string_view>

#include <json.hpp>

namespace amq {

/// "%.4f"; every float in reports and API responses goes through this.
std::string format_fixed4(double v);

void append_json_string(std::string& out, std::string_view s);

namespace detail {

template <typename Json>
void dump_fixed_into(std::string& out, const Json& v, int indent) {
    const std::string pad(static_cast<std::size_t>(2 * (indent + 1)), ' ');
    const std::string end(static_cast<std::size_t>(2 * indent), ' ');
    if (v.is_null()) {
        out += "null";
    } else if (v.is_boolean()) {
        out += v.template get<bool>() ? "true" : "false";
    } else if (v.is_number_unsigned()) {
        out += std::to_string(v.template get<std::uint64_t>());
    } else if (v.is_number_integer()) {
        out += std::to_string(v.template get<std::int64_t>());
    } else if (v.is_number_float()) {
        out += format_fixed4(v.template get<double>());
    } else if (v.is_string()) {
        append_json_string(out, v.template get_ref<const std::string&>());
    } else if (v.is_array()) {
        if (v.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& x : v) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            dump_fixed_into(out, x, indent + 1);
        }
        out += "\n" + end + "]";
    } else if (v.is_object()) {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad;
            append_json_string(out, it.key());
            out += ": ";
            dump_fixed_into(out, it.value(), indent + 1);
        }
        out += "\n" + end + "}";
    }
}

}  // namespace detail

/// Two-space indented JSON with floats as %.4f. Object keys come out in the
/// container's own order: sorted for nlohmann::json, insertion order for
/// nlohmann::ordered_json.
template <typename Json>
std::string dump_fixed(const Json& v) {
    std::string out;
    detail::dump_fixed_into(out, v, 0);
    return out;
}

}  // namespace amq
