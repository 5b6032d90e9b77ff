#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgsense/binsym.hpp"
#include "dgsense/field.hpp"

namespace dgsense {

using bigint = boost::multiprecision::cpp_int;

class invariant_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Weight-count table of a binary code of length 2^m.
struct WeightDistribution {
    int m = 0, r = 0;
    std::uint32_t length = 0;             // N = 2^m
    std::map<std::uint32_t, bigint> counts;  // weight -> number of codewords

    bigint code_size() const {
        bigint s = 0;
        for (auto& [w, c] : counts) s += c;
        return s;
    }
};

namespace detail {

inline bigint binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    bigint r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

}  // namespace detail

/// Krawtchouk polynomial K_l(z) for codes of length N:
/// sum_{j=0}^{l} (z choose j) (N-z choose l-j) (-1)^j, exact integers.
inline bigint krawtchouk_big(std::uint64_t l, std::uint64_t z, std::uint64_t N) {
    if (l > N || z > N) throw std::invalid_argument("krawtchouk: need 0 <= l, z <= N");
    bigint acc = 0;
    for (std::uint64_t j = 0; j <= l; ++j) {
        bigint term = detail::binomial(z, j) * detail::binomial(N - z, l - j);
        if (j & 1)
            acc -= term;
        else
            acc += term;
    }
    return acc;
}

inline long long krawtchouk(std::uint64_t l, std::uint64_t z, std::uint64_t N) {
    bigint v = krawtchouk_big(l, z, N);
    if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
        throw std::overflow_error("krawtchouk: value exceeds long long; use krawtchouk_big");
    return static_cast<long long>(v);
}

namespace detail {

inline std::filesystem::path weight_cache_path(const std::filesystem::path& dir, int m, int r,
                                               std::uint32_t poly) {
    char name[64];
    std::snprintf(name, sizeof name, "dg0-weights-m%d-r%d-poly%x.txt", m, r, poly);
    return dir / name;
}

inline std::optional<WeightDistribution> load_weights(const std::filesystem::path& file, int m, int r) {
    std::ifstream in(file);
    if (!in) return std::nullopt;
    std::string magic;
    int fm, fr;
    std::uint32_t len;
    std::size_t rows;
    if (!(in >> magic >> fm >> fr >> len >> rows) || magic != "DGW1" || fm != m || fr != r)
        return std::nullopt;
    WeightDistribution d;
    d.m = m;
    d.r = r;
    d.length = len;
    for (std::size_t i = 0; i < rows; ++i) {
        std::uint32_t w;
        std::string c;
        if (!(in >> w >> c)) return std::nullopt;
        d.counts[w] = bigint(c);
    }
    return d;
}

inline void store_weights(const std::filesystem::path& file, const WeightDistribution& d) {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file);
    out << "DGW1 " << d.m << ' ' << d.r << ' ' << d.length << ' ' << d.counts.size() << '\n';
    for (auto& [w, c] : d.counts) out << w << ' ' << c.str() << '\n';
}

}  // namespace detail

/// Exact weight distribution of the binary code carved out of the zero-diagonal
/// set DG_0(m,r) = { sum_{t=1..r} P^t(a_t) }: the codeword bit at position x is
/// (x P x^T mod 4) / 2. Enumeration is capped at rm <= 22; results can be
/// cached on disk keyed by (m, r, primitive polynomial).
inline WeightDistribution enumerate_dg0_weights(
    const Field& F, int r, const std::optional<std::filesystem::path>& cache_dir = std::nullopt) {
    const int m = F.m();
    if (r < 1 || 2 * r > m - 1)
        throw std::invalid_argument("enumerate_dg0_weights: need 1 <= r <= (m-1)/2");
    if (r * m > 22) throw std::length_error("enumerate_dg0_weights: rm exceeds the enumeration bound 22");
    if (cache_dir) {
        auto c = detail::load_weights(detail::weight_cache_path(*cache_dir, m, r, F.poly()), m, r);
        if (c) return *c;
    }
    WeightDistribution d;
    d.m = m;
    d.r = r;
    d.length = 1u << m;
    const std::uint64_t words = std::uint64_t{1} << (r * m);
    const std::uint32_t mask = (1u << m) - 1u;
    std::vector<gf> coeffs(r + 1, 0);
    for (std::uint64_t idx = 0; idx < words; ++idx) {
        for (int t = 1; t <= r; ++t) coeffs[t] = static_cast<gf>((idx >> ((t - 1) * m)) & mask);
        BinSymMatrix P = dg_matrix(F, coeffs);
        std::uint32_t w = 0;
        for (std::uint32_t x = 0; x < d.length; ++x) w += quad_form_z4(P, x) >> 1;  // values in {0,2}
        d.counts[w] += 1;
    }
    if (cache_dir) detail::store_weights(detail::weight_cache_path(*cache_dir, m, r, F.poly()), d);
    return d;
}

/// MacWilliams count of weight-2 dual codewords: (1/2^{rm}) sum_i W_i K_2(i).
/// These are exactly the pairs (x, x+e) satisfying the field condition (C1).
inline long long c1_count_macwilliams(const WeightDistribution& dist, int r) {
    bigint acc = 0;
    for (auto& [w, c] : dist.counts) acc += c * krawtchouk_big(2, w, dist.length);
    bigint size = bigint(1) << (r * dist.m);
    if (dist.code_size() != size)
        throw invariant_error("c1_count_macwilliams: distribution size != 2^{rm}");
    if (acc % size != 0)
        throw invariant_error("c1_count_macwilliams: MacWilliams sum is not divisible by the code size");
    bigint v = acc / size;
    if (v > std::numeric_limits<long long>::max())
        throw std::overflow_error("c1_count_macwilliams: count exceeds long long");
    return static_cast<long long>(v);
}

/// MacWilliams count of weight-1 dual codewords: (1/2^{rm}) sum_i W_i K_1(i).
/// For DG_0(m,r) this equals m+1 (the zero row and the m unit tuples).
inline long long weight1_dual_count(const WeightDistribution& dist, int r) {
    bigint acc = 0;
    for (auto& [w, c] : dist.counts) acc += c * krawtchouk_big(1, w, dist.length);
    bigint size = bigint(1) << (r * dist.m);
    if (acc % size != 0)
        throw invariant_error("weight1_dual_count: MacWilliams sum is not divisible by the code size");
    return static_cast<long long>(acc / size);
}

struct ClosedFormC1 {
    long long count = 0;    // 2^m - 1 - s
    long long s = 0;        // codewords of weight 2^{m-1}
    long long t = 0;        // weight 2^{m-1} - 2^{(m-1)/2}
    long long t_prime = 0;  // weight 2^{m-1} + 2^{(m-1)/2}
};

/// r=1 closed form: the C1 count is 2^m - 1 - s, with t and t' recovered from
/// 1 + t + s + t' = 2^m and t - t' = m 2^{(m-1)/2}.
inline ClosedFormC1 closed_form_c1_count(
    const Field& F, const std::optional<std::filesystem::path>& cache_dir = std::nullopt) {
    const int m = F.m();
    WeightDistribution d = enumerate_dg0_weights(F, 1, cache_dir);
    const std::uint32_t half = 1u << (m - 1);
    ClosedFormC1 out;
    auto it = d.counts.find(half);
    out.s = it == d.counts.end() ? 0 : static_cast<long long>(it->second);
    out.count = (1ll << m) - 1 - out.s;
    long long delta = static_cast<long long>(m) << ((m - 1) / 2);  // t - t'
    if (((out.count + delta) & 1) || out.count < delta)
        throw invariant_error("closed_form_c1_count: parity violation in t, t'");
    out.t = (out.count + delta) / 2;
    out.t_prime = (out.count - delta) / 2;
    return out;
}

}  // namespace dgsense
