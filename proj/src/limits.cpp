#include "whitneydim/limits.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace whitneydim {

namespace {

std::atomic<std::uint64_t> g_cap_override{0};
std::atomic<unsigned> g_threads{1};

std::uint64_t env_cap() {
    static const std::uint64_t cap = [] {
        const char* v = std::getenv("WHITNEYDIM_MAX_CELLS");
        if (v != nullptr && *v != '\0') {
            try {
                return static_cast<std::uint64_t>(std::stoull(v));
            } catch (...) {
            }
        }
        return std::uint64_t{1} << 26;
    }();
    return cap;
}

}  // namespace

std::uint64_t max_cells() {
    std::uint64_t o = g_cap_override.load();
    return o != 0 ? o : env_cap();
}

void set_max_cells(std::uint64_t cap) { g_cap_override.store(cap); }

unsigned thread_count() { return g_threads.load(); }

void set_thread_count(unsigned n) { g_threads.store(std::max(1u, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace whitneydim
