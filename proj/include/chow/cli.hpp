#pragma once

// Command-line front end. Exit codes: 0 success or affirmative answer,
// 1 negative answer, 2 usage or invalid input, 3 declared-data error,
// 4 search bound exceeded.

#include <ostream>
#include <string>
#include <vector>

namespace chow {

enum ExitCode : int { exit_ok = 0, exit_negative = 1, exit_usage = 2, exit_data = 3, exit_bound = 4 };

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chow
