#pragma once

#include <ostream>

namespace promptfold {

/// Entry point of the promptfold command line. Returns the process exit
/// code: 0 success, 1 configuration error, 2 backend failure, 3 validation
/// failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace promptfold
