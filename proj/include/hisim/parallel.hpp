#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace hisim {

inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Callers write results into
/// slot i so the outcome does not depend on scheduling. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1)));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < w; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for ensemble member `index` under a run seed.
inline std::mt19937_64 member_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 1)));
}

}  // namespace hisim
