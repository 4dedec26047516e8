#pragma once

#include <iosfwd>

namespace searchbias {

/// Full command-line front end. Streams are injectable so tests can drive
/// commands in-process. Returns the process exit code: 0 on success (and all
/// checks passing), 1 when verification checks fail, 2 on usage/IO errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace searchbias
