#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace opgroth {

// Report schema version carried by every JSON line.
inline constexpr int kReportVersion = 1;

// Runs one command line (without the program name). Exit status 0 when
// every requested check is empty, 1 on check violations, 2 on usage,
// parse or structural errors. Reports go to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opgroth
