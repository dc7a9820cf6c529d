#ifndef GLR_PARALLEL_HPP
#define GLR_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace glr {

/// Worker cap for the parallel stages. Controlled by the GLR_THREADS
/// environment variable (0 or unset = hardware concurrency). Reread on every
/// call so tests can flip it between runs.
inline int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("GLR_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<int>(v);
    }
    return hw;
}

/// Static-partition parallel loop over [0, n). Each index is processed
/// exactly once; fn must write only to its own slot so results do not depend
/// on the thread count.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    if (n <= 0) return;
    int workers = worker_count();
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    std::exception_ptr error;
    std::mutex error_mutex;
    int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int begin = w * chunk;
        int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([begin, end, &fn, &error, &error_mutex] {
            try {
                for (int i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace glr

#endif // GLR_PARALLEL_HPP
