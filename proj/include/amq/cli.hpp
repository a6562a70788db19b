#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace amq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitProvider = 3;

/// Entry point for the `amq` tool: embed | query | evaluate | serve.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amq::cli
