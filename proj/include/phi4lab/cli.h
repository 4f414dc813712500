#pragma once

#include <iosfwd>

namespace phi4lab {

// phi4lab <info|solve|sweep|verify|report> --config <path> [--out <dir>] [--seed <n>]
// Returns 0 when every check passes, 1 when any check failed, 2 on configuration
// or runtime errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phi4lab
