#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hjb {

/// Static range split across `workers` threads; body(i) must be independent
/// across indices so results cannot depend on the schedule. If bodies throw,
/// the exception from the lowest thread chunk is rethrown after all threads
/// join.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(n_threads);
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t begin = count * t / n_threads;
        const std::size_t end = count * (t + 1) / n_threads;
        threads.emplace_back([&body, &errors, t, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) {
        th.join();
    }
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

}  // namespace hjb
