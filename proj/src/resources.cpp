#include "cdtrade/resources.hpp"

#include "cdtrade/error.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace cdtrade {

Deadline Deadline::after(std::chrono::duration<double> budget) {
    Deadline d;
    d.until_ = std::chrono::steady_clock::now() +
               std::chrono::duration_cast<std::chrono::steady_clock::duration>(budget);
    return d;
}

bool Deadline::expired() const {
    return until_ && std::chrono::steady_clock::now() >= *until_;
}

void Deadline::check(const char* where) const {
    if (expired()) throw Error(ErrorCode::Timeout, std::string("time budget exhausted in ") + where);
}

double peak_rss_mb() {
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            std::istringstream in(line.substr(6));
            double kb = 0;
            in >> kb;
            return kb / 1024.0;
        }
    }
    return 0.0;
}

bool reset_peak_rss() {
    std::ofstream refs("/proc/self/clear_refs");
    if (!refs) return false;
    refs << "5";
    return static_cast<bool>(refs.flush());
}

void atomic_write(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Unreadable, "cannot open " + tmp.string() + " for writing");
        try {
            writer(out);
        } catch (...) {
            out.close();
            std::filesystem::remove(tmp);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw Error(ErrorCode::Unreadable, "write failed for " + path.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace cdtrade
