#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace dgsense {

/// Runs fn(i) for i in [0, n) across `workers` threads. Callers store per-index
/// results into preallocated slots and reduce in index order afterwards, so the
/// aggregate does not depend on the worker count.
template <typename Fn>
void parallel_for_index(std::uint64_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::uint64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto body = [&] {
        for (;;) {
            std::uint64_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int nt = std::min<std::uint64_t>(workers, n);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
}

/// splitmix64-style mixer for deriving independent seeds from components.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t double_bits(double v) {
    std::uint64_t u;
    static_assert(sizeof u == sizeof v);
    __builtin_memcpy(&u, &v, sizeof u);
    return u;
}

}  // namespace dgsense
