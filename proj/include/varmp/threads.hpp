#pragma once

// Deterministic fan-out: work is cut into a fixed number of chunks regardless
// of the thread count, and chunk results are combined in index order.

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace varmp {

/// Worker count: VARMP_THREADS if set and positive, else the hardware count.
inline unsigned thread_budget()
{
    if (const char* env = std::getenv("VARMP_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(begin, end, chunk) over [0, n) split into `chunks` pieces.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunks, Body&& body, std::size_t min_parallel = 4096)
{
    chunks = std::max<std::size_t>(1, std::min(chunks, n));
    auto range = [&](std::size_t c) { return std::pair{n * c / chunks, n * (c + 1) / chunks}; };
    const unsigned workers = std::min<unsigned>(thread_budget(), static_cast<unsigned>(chunks));
    if (workers <= 1 || n < min_parallel) {
        for (std::size_t c = 0; c < chunks; ++c) {
            auto [b, e] = range(c);
            body(b, e, c);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t c = w; c < chunks; c += workers) {
                auto [b, e] = range(c);
                body(b, e, c);
            }
        });
    for (auto& t : pool)
        t.join();
}

/// Sum of f(i) over [0, n), bit-identical for any thread count.
template <class F>
double deterministic_sum(std::size_t n, F&& f)
{
    constexpr std::size_t chunks = 64;
    std::vector<double> partial(chunks, 0.0);
    parallel_chunks(n, chunks, [&](std::size_t b, std::size_t e, std::size_t c) {
        double s = 0.0;
        for (std::size_t i = b; i < e; ++i)
            s += f(i);
        partial[c] = s;
    });
    double s = 0.0;
    for (double v : partial)
        s += v;
    return s;
}

} // namespace varmp
