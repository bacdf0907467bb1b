#pragma once

#include <iosfwd>

namespace sketchkrr {

/// Entry point of the `sketchkrr` tool. Returns 0 on success, 2 on usage
/// errors and 1 on runtime failures.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sketchkrr
