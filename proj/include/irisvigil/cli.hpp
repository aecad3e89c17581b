#pragma once

#include <iosfwd>

namespace irisvigil::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitAlgorithm = 3;

/// Entry point of the `irisvigil` tool. JSON goes to out, diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace irisvigil::cli
