#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dgsense/codebook.hpp"
#include "dgsense/field.hpp"

namespace dgsense {

/// A pair of non-orthogonal sieve rows {x, x+e}, stored with x < x^e.
struct RowPair {
    std::uint32_t x = 0;
    gf e = 0;
    std::complex<double> inner{};  // <phi(x), phi(x+e)> over unnormalized rows

    std::uint32_t y() const { return x ^ e; }
};

struct DedupeReport {
    int m = 0, r = 0;
    std::vector<RowPair> pairs;
    std::vector<std::uint32_t> rows_to_delete;  // sorted
    std::uint32_t resulting_rows = 0;
    bool pairs_disjoint = true;
    bool is_tight_after = false;
    std::optional<double> tight_residual_after;  // evaluated numerically when feasible
};

namespace detail {

/// Exact integer counts of i^0, i^1, i^2, i^3 terms in the t=0 (Kerdock)
/// character sum  sum_a i^{(x+e)P^0(a)(x+e)^T - x P^0(a) x^T}.
///
/// The exponent splits into a signed count of diagonal trace bits plus twice a
/// linear functional of a, so the sweep over a walks a Gray code and updates
/// per-bit trace words in O(1) per step.
struct QuaternaryCounts {
    long long n[4] = {0, 0, 0, 0};
    std::complex<double> value() const {
        return {static_cast<double>(n[0] - n[2]), static_cast<double>(n[1] - n[3])};
    }
    bool nonzero() const { return n[0] != n[2] || n[1] != n[3]; }
};

inline QuaternaryCounts kerdock_counts(const Field& F, std::uint32_t x, gf e) {
    if (e == 0) throw std::domain_error("kerdock character sum requires e != 0");
    const int m = F.m();
    const std::uint32_t A = e & ~x;  // diagonal terms entering with +1
    const std::uint32_t B = e & x;   // diagonal terms entering with -1

    // delta_u carries the doubled (mod 4) part: X*E + sum_{i in B} xi^{2i} +
    // sum_{i<j in e} xi^{i+j}
    gf du = F.mul(x, e);
    for (std::uint32_t s = B; s;) {
        int i = std::countr_zero(s);
        s &= s - 1;
        du ^= F.xi_pow(2ull * i);
    }
    for (int i = 0; i < m; ++i) {
        if (!((e >> i) & 1)) continue;
        for (int j = i + 1; j < m; ++j)
            if ((e >> j) & 1) du ^= F.xi_pow(static_cast<std::uint64_t>(i) + j);
    }

    std::uint32_t flipA[32], flipB[32], flip2 = 0;
    for (int p = 0; p < m; ++p) {
        std::uint32_t fa = 0, fb = 0;
        for (int i = 0; i < m; ++i) {
            if (!((e >> i) & 1)) continue;
            if (F.trace(F.xi_pow(2ull * i + p))) {
                if ((A >> i) & 1)
                    fa |= 1u << i;
                else
                    fb |= 1u << i;
            }
        }
        flipA[p] = fa;
        flipB[p] = fb;
        if (F.trace(F.mul(du, F.xi_pow(p)))) flip2 |= 1u << p;
    }

    QuaternaryCounts counts;
    std::uint32_t wA = 0, wB = 0;
    int b2 = 0;
    ++counts.n[0];  // a = 0
    const std::uint32_t n = 1u << m;
    for (std::uint32_t s = 1; s < n; ++s) {
        int p = std::countr_zero(s);
        wA ^= flipA[p];
        wB ^= flipB[p];
        b2 ^= (flip2 >> p) & 1;
        int dq = (std::popcount(wA) - std::popcount(wB) + 2 * b2 + 64) & 3;
        ++counts.n[dq];
    }
    return counts;
}

}  // namespace detail

/// The t-th condition of the non-orthogonality theorem, checked through the
/// equivalent field identity x e^{2^t} + x^{2^t} e + e^{2^t+1} + sum_j e_j xi^{j(2^t+1)} = 0.
inline bool c1_holds_for_t(const Field& F, std::uint32_t x, gf e, int t) {
    if (e == 0) throw std::domain_error("c1_holds_for_t: e must be nonzero");
    const std::uint64_t q = (std::uint64_t{1} << t) + 1;
    gf du = F.mul(static_cast<gf>(x), F.frob_pow(e, t));
    du ^= F.mul(F.frob_pow(static_cast<gf>(x), t), e);
    du ^= F.pow(e, q);
    for (int j = 0; j < F.m(); ++j)
        if ((e >> j) & 1) du ^= F.xi_pow(q * j);
    return du == 0;
}

/// All x such that the pair (x, x+e) satisfies the field conditions for every
/// t in 1..r. Solved at t=1 through the Artin-Schreier half-trace, then the
/// candidates are filtered through the remaining conditions.
inline std::vector<gf> c1_solve(const Field& F, gf e, int r) {
    if (e == 0) throw std::domain_error("c1_solve: e must be nonzero");
    if (r < 1) throw std::invalid_argument("c1_solve: r >= 1 required");
    gf s3 = 0;
    for (int j = 0; j < F.m(); ++j)
        if ((e >> j) & 1) s3 ^= F.xi_pow(3ull * j);
    gf lambda = 1u ^ F.mul(s3, F.inverse(F.pow(e, 3)));
    auto roots = F.solve_artin_schreier(lambda);
    if (!roots) return {};
    gf x1 = F.mul(e, roots->first);
    gf x2 = x1 ^ e;
    for (int t = 2; t <= r; ++t)
        if (!c1_holds_for_t(F, x1, e, t)) return {};  // the two roots pass or fail together
    std::vector<gf> out{x1, x2};
    std::sort(out.begin(), out.end());
    return out;
}

/// Closed-form compatibility between the t=1 and t=2 conditions: the odd-power
/// half-trace of 1 + (sum e_j xi^{5j})/e^5 must reproduce 1 + (sum e_j xi^{3j})/e^3.
inline bool c1_consistency(const Field& F, gf e) {
    if (e == 0) throw std::domain_error("c1_consistency: e must be nonzero");
    gf s3 = 0, s5 = 0;
    for (int j = 0; j < F.m(); ++j)
        if ((e >> j) & 1) {
            s3 ^= F.xi_pow(3ull * j);
            s5 ^= F.xi_pow(5ull * j);
        }
    gf lambda = 1u ^ F.mul(s3, F.inverse(F.pow(e, 3)));
    gf alpha = 1u ^ F.mul(s5, F.inverse(F.pow(e, 5)));
    return F.half_trace_odd(alpha) == lambda;
}

/// Condition (C2): the Kerdock character sum over all 2^m values of a is nonzero.
inline bool c2_check(const Field& F, std::uint32_t x, gf e) {
    return detail::kerdock_counts(F, x, e).nonzero();
}

/// Exact complex value of the t=0 character-sum factor.
inline std::complex<double> kerdock_row_factor(const Field& F, std::uint32_t x, gf e) {
    return detail::kerdock_counts(F, x, e).value();
}

enum class GramMode { auto_select, direct, charsum };

namespace detail {

/// Row Gram by direct column summation: every column's Z4 exponents are packed
/// into two bit-planes and each pair's quaternary histogram is accumulated with
/// word-parallel mod-4 subtraction.
inline Eigen::MatrixXcd row_gram_direct(const CodebookSpec& spec) {
    const std::uint64_t C = spec.num_columns();
    const auto rows = spec.kept_rows();
    const std::uint32_t N = static_cast<std::uint32_t>(rows.size());
    const std::uint64_t words = (C + 63) / 64;
    if (N * words * 16 > (std::uint64_t{1} << 31))
        throw std::length_error("row_gram_direct: bit-plane storage exceeds 2 GiB");
    std::vector<std::uint64_t> lo(N * words, 0), hi(N * words, 0);
    for_each_column(spec, [&](std::uint64_t col, std::span<const std::uint8_t> exps) {
        const std::uint64_t w = col >> 6;
        const std::uint64_t bit = std::uint64_t{1} << (col & 63);
        for (std::uint32_t i = 0; i < N; ++i) {
            std::uint8_t e = exps[rows[i]];
            if (e & 1) lo[i * words + w] |= bit;
            if (e & 2) hi[i * words + w] |= bit;
        }
    });
    const std::uint64_t slack = words * 64 - C;  // unused high bits in the last word
    Eigen::MatrixXcd G(N, N);
    const double inv_n = 1.0 / N;
    for (std::uint32_t a = 0; a < N; ++a) {
        G(a, a) = static_cast<double>(C) * inv_n;
        const std::uint64_t* la = &lo[a * words];
        const std::uint64_t* ha = &hi[a * words];
        for (std::uint32_t b = a + 1; b < N; ++b) {
            const std::uint64_t* lb = &lo[b * words];
            const std::uint64_t* hb = &hi[b * words];
            long long n1 = 0, n2 = 0, n3 = 0;
            for (std::uint64_t w = 0; w < words; ++w) {
                std::uint64_t dlo = la[w] ^ lb[w];
                std::uint64_t borrow = la[w] & ~lb[w];
                std::uint64_t dhi = ha[w] ^ hb[w] ^ borrow;
                n1 += std::popcount(dlo & ~dhi);
                n3 += std::popcount(dlo & dhi);
                n2 += std::popcount(~dlo & dhi);
            }
            // the slack bits contribute to n0 only (both planes zero there)
            long long n0 = static_cast<long long>(C) - n1 - n2 - n3;
            std::complex<double> v{(n0 - n2) * inv_n, (n1 - n3) * inv_n};
            G(a, b) = v;
            G(b, a) = std::conj(v);
        }
    }
    (void)slack;
    return G;
}

/// Row Gram through the per-t character-sum factorization. Each t >= 1 factor
/// is 2^m or 0 according to the field identity; the t=0 factor is the exact
/// Kerdock sum; frames carry an extra b-factor that vanishes for distinct rows.
inline Eigen::MatrixXcd row_gram_charsum(const CodebookSpec& spec) {
    const Field F = spec.field();
    const auto rows = spec.kept_rows();
    const std::uint32_t N = static_cast<std::uint32_t>(rows.size());
    const double red = spec.redundancy();
    Eigen::MatrixXcd G = red * Eigen::MatrixXcd::Identity(N, N);
    if (spec.variant == Variant::frame) return G;  // b-sum kills every e != 0 term
    const double scale = std::ldexp(1.0, spec.r * spec.m - spec.m);  // 2^{rm} / 2^m ... times 2^m/N below
    const double row_adjust = static_cast<double>(spec.full_rows()) / N;
    for (std::uint32_t a = 0; a < N; ++a) {
        for (std::uint32_t b = a + 1; b < N; ++b) {
            std::uint32_t x = rows[a];
            gf e = static_cast<gf>(rows[a] ^ rows[b]);
            bool ok = true;
            for (int t = 1; t <= spec.r && ok; ++t) ok = c1_holds_for_t(F, x, e, t);
            if (!ok) {
                G(a, b) = G(b, a) = 0.0;
                continue;
            }
            std::complex<double> v = kerdock_row_factor(F, x, e) * scale * row_adjust;
            G(a, b) = v;
            G(b, a) = std::conj(v);
        }
    }
    return G;
}

/// Direct mode when the bit planes and the pairwise sweep stay cheap.
inline bool direct_mode_feasible(const CodebookSpec& spec) {
    const std::uint64_t C = spec.num_columns();
    const std::uint64_t N = spec.num_rows();
    const std::uint64_t words = (C + 63) / 64;
    return N * words * 16 <= (std::uint64_t{1} << 31) && N * N * words <= (std::uint64_t{1} << 31);
}

inline Eigen::MatrixXcd row_gram_auto(const CodebookSpec& spec) {
    return direct_mode_feasible(spec) ? row_gram_direct(spec) : row_gram_charsum(spec);
}

}  // namespace detail

/// Exact N x N row Gram of the codebook, by direct column summation or by the
/// character-sum factorization. The two routes must agree to 1e-10.
inline Eigen::MatrixXcd gram_rows_bruteforce(const CodebookSpec& spec,
                                             GramMode mode = GramMode::auto_select) {
    if ((spec.r + 1) * spec.m > 22)
        throw std::length_error("gram_rows_bruteforce: (r+1)m exceeds the cost bound 22");
    switch (mode) {
        case GramMode::direct: return detail::row_gram_direct(spec);
        case GramMode::charsum: return detail::row_gram_charsum(spec);
        default: return detail::row_gram_auto(spec);
    }
}

/// Largest |eigenvalue| of G - redundancy * I.
inline double tight_residual_of_gram(const Eigen::MatrixXcd& G, double redundancy) {
    Eigen::MatrixXcd R = G - redundancy * Eigen::MatrixXcd::Identity(G.rows(), G.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

/// Sweep all nonzero offsets e, solve the t=1 field equation, filter through
/// the higher-t conditions and the Kerdock character sum, and assemble the
/// duplicate-row report for the sieve described by `spec` (its excluded rows
/// are honored). Each unordered pair {x, x+e} is reached by exactly one e, so
/// no deduplication is needed.
inline DedupeReport find_nonorthogonal_pairs(const CodebookSpec& spec, bool evaluate_tightness = true) {
    if (spec.variant != Variant::sieve)
        throw std::invalid_argument("find_nonorthogonal_pairs: frames have orthogonal rows");
    const int m = spec.m, r = spec.r;
    if (r < 1) throw std::invalid_argument("find_nonorthogonal_pairs: need 1 <= r <= (m-1)/2");
    const Field F = spec.field();
    DedupeReport rep;
    rep.m = m;
    rep.r = r;
    const std::uint32_t n = 1u << m;
    auto excluded = [&](std::uint32_t row) {
        return std::binary_search(spec.excluded_rows.begin(), spec.excluded_rows.end(),
                                  static_cast<std::uint16_t>(row));
    };
    const double scale = std::ldexp(1.0, r * m) / spec.num_rows();  // 2^{rm} / N
    for (gf e = 1; e < n; ++e) {
        auto xs = c1_solve(F, e, r);
        if (xs.empty()) continue;
        std::uint32_t x = std::min(xs[0], static_cast<gf>(xs[0] ^ e));
        if (excluded(x) || excluded(x ^ e)) continue;
        auto counts = detail::kerdock_counts(F, x, e);
        if (!counts.nonzero()) continue;
        rep.pairs.push_back({x, e, counts.value() * scale});
    }
    std::sort(rep.pairs.begin(), rep.pairs.end(),
              [](const RowPair& a, const RowPair& b) { return a.x < b.x || (a.x == b.x && a.e < b.e); });

    std::map<std::uint32_t, int> degree;
    for (auto& p : rep.pairs) {
        ++degree[p.x];
        ++degree[p.y()];
    }
    rep.pairs_disjoint = std::all_of(degree.begin(), degree.end(),
                                     [](auto& kv) { return kv.second == 1; });
    // Every row incident to a non-orthogonal pair is deleted. The m+1 rows with
    // non-vanishing column sums form a mutual clique, so covering one endpoint
    // per pair would keep rows that the reported counts remove.
    for (auto& [row, deg] : degree) rep.rows_to_delete.push_back(row);
    std::sort(rep.rows_to_delete.begin(), rep.rows_to_delete.end());
    rep.resulting_rows = spec.num_rows() - static_cast<std::uint32_t>(rep.rows_to_delete.size());

    rep.is_tight_after = true;  // all incident rows removed, no pair survives
    if (evaluate_tightness && m <= 9) {
        CodebookSpec reduced = spec;
        for (auto x : rep.rows_to_delete) reduced.excluded_rows.push_back(static_cast<std::uint16_t>(x));
        std::sort(reduced.excluded_rows.begin(), reduced.excluded_rows.end());
        Eigen::MatrixXcd G = detail::row_gram_auto(reduced);
        rep.tight_residual_after = tight_residual_of_gram(G, reduced.redundancy());
        rep.is_tight_after = *rep.tight_residual_after <= 1e-8;
    }
    return rep;
}

/// Full-sieve report (no prior row exclusions); reproduces the published
/// deletion counts.
inline DedupeReport find_nonorthogonal_pairs(const Field& F, int r, bool evaluate_tightness = true) {
    return find_nonorthogonal_pairs(CodebookSpec::make(F.m(), r, Variant::sieve, F.poly()),
                                    evaluate_tightness);
}

}  // namespace dgsense
