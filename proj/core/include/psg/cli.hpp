#pragma once

namespace psg::cli {

// Entry point shared by the psglab tool and the test harness.
// Exit codes: 0 success, 2 validation failure, 3 numerical failure
// (reported as "ERROR <code> <detail>" on stderr).
int run(int argc, const char* const* argv);

}  // namespace psg::cli
