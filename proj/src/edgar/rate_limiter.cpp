#include "tenk/edgar/rate_limiter.hpp"

#include <cmath>
#include <map>
#include <thread>

#include "tenk/error.hpp"

namespace tenk::edgar {

RateLimiter::RateLimiter(double max_per_second) {
    if (!(max_per_second > 0.0)) throw Error(ErrorCode::InvalidArgument, "rate must be positive");
    if (max_per_second >= 1.0) {
        capacity_ = static_cast<std::size_t>(std::floor(max_per_second));
        window_ = std::chrono::seconds(1);
    } else {
        capacity_ = 1;
        window_ = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(1.0 / max_per_second));
    }
}

RateLimiter::Clock::time_point RateLimiter::acquire() {
    // The lock is held while sleeping so that release order is FIFO-ish and
    // the whole process shares one schedule.
    std::lock_guard lock(mutex_);
    auto now = Clock::now();
    while (!released_.empty() && now - released_.front() >= window_) released_.pop_front();
    while (released_.size() >= capacity_) {
        auto next = released_.front() + window_;
        std::this_thread::sleep_until(next);
        now = Clock::now();
        while (!released_.empty() && now - released_.front() >= window_) released_.pop_front();
    }
    released_.push_back(now);
    return now;
}

std::shared_ptr<RateLimiter> shared_rate_limiter(double max_per_second) {
    static std::mutex mutex;
    static std::map<double, std::shared_ptr<RateLimiter>> limiters;
    std::lock_guard lock(mutex);
    auto& slot = limiters[max_per_second];
    if (!slot) slot = std::make_shared<RateLimiter>(max_per_second);
    return slot;
}

}  // namespace tenk::edgar
