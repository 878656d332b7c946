#pragma once

#include <chrono>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>

namespace tenk::edgar {

/// Sliding-window gate: over any window of `window()` length at most
/// `capacity()` callers are released. Callers beyond that block in acquire().
/// Rates >= 1 use a one-second window with floor(rate) slots; slower rates
/// use one slot and a 1/rate window.
class RateLimiter {
public:
    using Clock = std::chrono::steady_clock;

    explicit RateLimiter(double max_per_second);

    /// Blocks until the caller may proceed; returns the release instant.
    Clock::time_point acquire();

    std::size_t capacity() const noexcept { return capacity_; }
    Clock::duration window() const noexcept { return window_; }

private:
    std::mutex mutex_;
    std::deque<Clock::time_point> released_;
    std::size_t capacity_;
    Clock::duration window_;
};

/// Process-wide limiter for the given rate, shared by every client that
/// asks for the same rate.
std::shared_ptr<RateLimiter> shared_rate_limiter(double max_per_second);

}  // namespace tenk::edgar
