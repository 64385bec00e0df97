#pragma once

#include <string>
#include <vector>

namespace cdtrade::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDataError = 2,
    kNumericError = 3,
};

// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

// "1.5" / "1.5s" / "250ms" / "2m" -> seconds.
double parse_duration(const std::string& text);
// "512" (MiB) / "512MB" / "16GB" -> bytes.
double parse_memory(const std::string& text);

}  // namespace cdtrade::cli
