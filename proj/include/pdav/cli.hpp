#pragma once

#include <iosfwd>

namespace pdav {

/// Entry point of the `pdav` tool. Returns 0 on success, 2 on usage errors
/// and 1 on any other failure. Diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pdav
