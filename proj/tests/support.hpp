#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "tenk/edgar/edgar_client.hpp"
#include "tenk/http_transport.hpp"

namespace tenk::testing {

inline std::filesystem::path fixture_dir() { return TENK_FIXTURE_DIR; }
inline std::filesystem::path fixture_cache() { return fixture_dir() / "edgar_cache"; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "tenk") {
        static std::atomic<unsigned> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Copy of the fixture cache that tests may write into.
inline void copy_fixture_cache(const std::filesystem::path& to) {
    std::filesystem::copy(fixture_cache(), to, std::filesystem::copy_options::recursive);
}

/// Records every request; answers through `handler` (default: 200 "{}").
class MockTransport : public HttpTransport {
public:
    using Handler = std::function<HttpResponse(const HttpRequest&)>;

    explicit MockTransport(Handler handler = {}) : handler_(std::move(handler)) {}

    HttpResponse send(const HttpRequest& request) override {
        {
            std::lock_guard lock(mutex_);
            requests_.push_back(request);
        }
        if (handler_) return handler_(request);
        return HttpResponse{200, "{}", {}};
    }

    std::vector<HttpRequest> requests() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }
    std::size_t count() const {
        std::lock_guard lock(mutex_);
        return requests_.size();
    }

private:
    Handler handler_;
    mutable std::mutex mutex_;
    std::vector<HttpRequest> requests_;
};

inline edgar::FetchPolicy offline_policy(const std::filesystem::path& cache) {
    edgar::FetchPolicy p;
    p.cache_dir = cache;
    p.offline_mode = true;
    p.user_agent = "tenk-tests admin@example.com";
    return p;
}

/// Offline client over a cache directory.
inline edgar::EdgarClient offline_client(const std::filesystem::path& cache) {
    return edgar::EdgarClient(offline_policy(cache), nullptr);
}

/// Retry policy that never sleeps.
inline edgar::RetryPolicy no_wait_retry() {
    edgar::RetryPolicy r;
    r.sleep = [](std::chrono::milliseconds) {};
    return r;
}

}  // namespace tenk::testing
