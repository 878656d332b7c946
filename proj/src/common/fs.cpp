#include "tenk/fs.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace tenk::fs {

namespace stdfs = std::filesystem;

void atomic_write(const stdfs::path& target, std::string_view bytes, ErrorCode failure_code) {
    static std::atomic<unsigned long> counter{0};
    std::error_code ec;
    if (target.has_parent_path()) {
        stdfs::create_directories(target.parent_path(), ec);
        if (ec) throw Error(failure_code, "cannot create " + target.parent_path().string() + ": " + ec.message());
    }
    auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    stdfs::path temp = target;
    temp += ".tmp." + std::to_string(tid) + "." + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(failure_code, "cannot open " + temp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            out.close();
            stdfs::remove(temp, ec);
            throw Error(failure_code, "short write to " + temp.string());
        }
    }
    stdfs::rename(temp, target, ec);
    if (ec) {
        std::error_code ignored;
        stdfs::remove(temp, ignored);
        throw Error(failure_code, "cannot rename into " + target.string() + ": " + ec.message());
    }
}

std::optional<std::string> read_file(const stdfs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void append_line(const stdfs::path& path, std::string_view line) {
    std::error_code ec;
    if (path.has_parent_path()) stdfs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::CacheWriteError, "cannot append to " + path.string());
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.put('\n');
    out.flush();
    if (!out) throw Error(ErrorCode::CacheWriteError, "short append to " + path.string());
}

std::vector<std::string> read_lines(const stdfs::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    return lines;
}

}  // namespace tenk::fs
