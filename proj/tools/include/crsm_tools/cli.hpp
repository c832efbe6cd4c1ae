#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// it can be driven from tests.

#include <iosfwd>

namespace crsm::cli {

/// Exit codes: 0 success, 1 failed verification, 2 malformed JSON,
/// 3 size cap exceeded, 4 other errors (bad arguments, unreadable files,
/// invalid models). Command-line usage errors use CLI11's codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace crsm::cli
