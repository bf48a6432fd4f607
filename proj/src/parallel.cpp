#include "nlab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace nlab {

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("NEHARI_LAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

std::vector<double> chunked_map(std::int64_t n, std::int64_t chunk,
                                const std::function<double(std::int64_t, std::int64_t)>& body) {
    if (n <= 0) return {};
    const std::int64_t chunks = (n + chunk - 1) / chunk;
    std::vector<double> parts(static_cast<std::size_t>(chunks), 0.0);
    const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), chunks));
    if (workers <= 1) {
        for (std::int64_t c = 0; c < chunks; ++c)
            parts[static_cast<std::size_t>(c)] =
                body(c * chunk, std::min(n, (c + 1) * chunk));
        return parts;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t]() {
            for (std::int64_t c = t; c < chunks; c += workers)
                parts[static_cast<std::size_t>(c)] =
                    body(c * chunk, std::min(n, (c + 1) * chunk));
        });
    }
    for (auto& th : pool) th.join();
    return parts;
}

double ordered_sum(const std::vector<double>& parts) {
    double s = 0;
    for (double p : parts) s += p;
    return s;
}

double chunked_reduce(std::int64_t n, std::int64_t chunk,
                      const std::function<double(std::int64_t, std::int64_t)>& body) {
    return ordered_sum(chunked_map(n, chunk, body));
}

void parallel_for(std::int64_t n, std::int64_t chunk,
                  const std::function<void(std::int64_t, std::int64_t)>& body) {
    chunked_map(n, chunk, [&](std::int64_t b, std::int64_t e) {
        body(b, e);
        return 0.0;
    });
}

} // namespace nlab
