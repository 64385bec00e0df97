#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>

namespace cdtrade {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Cooperative wall-clock budget. A default-constructed deadline never expires.
class Deadline {
public:
    Deadline() = default;
    static Deadline after(std::chrono::duration<double> budget);

    bool expired() const;
    // Throws Error(Timeout) once expired.
    void check(const char* where) const;
    bool bounded() const { return until_.has_value(); }

private:
    std::optional<std::chrono::steady_clock::time_point> until_;
};

// Peak resident set size of this process in MiB (VmHWM), 0 if unavailable.
double peak_rss_mb();
// Resets the kernel's peak-RSS counter where supported (Linux clear_refs "5").
bool reset_peak_rss();

// Writes through a temp file in the same directory and renames it into place,
// so the destination is either the complete new content or untouched.
void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

}  // namespace cdtrade
