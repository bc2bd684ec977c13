#ifndef ABCBP_PARALLEL_HPP
#define ABCBP_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace abcbp {

// Calls fn(i) for i in [0, n). With threads <= 1 the calls run in order on the
// calling thread. Otherwise work is shared between `threads` workers; fn must
// only write to state owned by index i. The first exception thrown is
// rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn)
{
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        const std::size_t count = std::min(threads, n);
        workers.reserve(count);
        for (std::size_t t = 0; t < count; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

} // namespace abcbp

#endif
