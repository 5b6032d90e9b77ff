#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dgsense {

/// Element of GF(2^m): bit i holds the coefficient of xi^i.
using gf = std::uint32_t;

/// Arithmetic in GF(2^m) = F2[x]/(g) for odd m, 3 <= m <= 31, with g primitive.
///
/// For m <= 21 the field carries log/antilog tables built by walking the powers
/// of xi; hitting 1 before step 2^m-1 rejects the polynomial. Larger degrees
/// use shift-and-reduce multiplication and a factored order check. Either way
/// construction certifies ord(xi) = 2^m - 1, which implies g is primitive and
/// irreducible.
class Field {
public:
    Field(int m, std::uint32_t primitive_poly) : m_(m), poly_(primitive_poly) {
        if (m < 3 || m > 31 || m % 2 == 0)
            throw std::invalid_argument("Field: extension degree must be odd, 3 <= m <= 31");
        mask_ = (m == 31) ? 0x7fffffffu : ((1u << m) - 1u);
        if ((primitive_poly >> m) != 1u || (primitive_poly & 1u) == 0)
            throw std::invalid_argument("Field: polynomial must have degree m and nonzero constant term");
        if (m <= kMaxTableDegree)
            build_tables();
        else
            verify_order_factored();
        trace_mask_ = 0;
        for (int i = 0; i < m_; ++i)
            if (trace_by_squaring(xi_to(i))) trace_mask_ |= 1u << i;
    }

    static std::uint32_t default_poly(int m) {
        switch (m) {
            case 3: return 0x0bu;      // x^3 + x + 1 (as in the worked m=3 examples)
            case 5: return 0x25u;      // x^5 + x^2 + 1
            case 7: return 0x83u;      // x^7 + x + 1
            case 9: return 0x211u;     // x^9 + x^4 + 1
            case 11: return 0x805u;    // x^11 + x^2 + 1
            case 13: return 0x201bu;   // x^13 + x^4 + x^3 + x + 1
            case 15: return 0x8003u;   // x^15 + x + 1
            default:
                throw std::invalid_argument("Field: no default primitive polynomial for m=" +
                                            std::to_string(m));
        }
    }

    static Field with_default_poly(int m) { return Field(m, default_poly(m)); }

    int m() const { return m_; }
    std::uint32_t poly() const { return poly_; }
    std::uint32_t elem_mask() const { return mask_; }
    std::uint64_t size() const { return static_cast<std::uint64_t>(mask_) + 1u; }  // 2^m
    std::uint32_t group_order() const { return mask_; }                            // 2^m - 1

    gf mul(gf a, gf b) const {
        check(a);
        check(b);
        if (a == 0 || b == 0) return 0;
        if (tab_) {
            std::uint32_t s = tab_->log[a] + tab_->log[b];
            if (s >= group_order()) s -= group_order();
            return tab_->antilog[s];
        }
        return mul_shift_reduce(a, b);
    }

    gf sqr(gf a) const { return mul(a, a); }

    /// Tr(a) = a + a^2 + ... + a^{2^{m-1}}, evaluated through the linear mask.
    int trace(gf a) const {
        check(a);
        return std::popcount(a & trace_mask_) & 1;
    }

    /// a^{2^t} (t squarings; Frobenius has order m).
    gf frob_pow(gf a, long t) const {
        check(a);
        if (t < 0) throw std::invalid_argument("Field::frob_pow: negative exponent");
        gf r = a;
        for (long i = 0, n = t % m_; i < n; ++i) r = mul(r, r);
        return r;
    }

    gf pow(gf a, std::uint64_t e) const {
        check(a);
        if (a == 0) return e == 0 ? 1u : 0u;
        if (tab_) {
            std::uint64_t k = (tab_->log[a] * (e % group_order())) % group_order();
            return tab_->antilog[k];
        }
        return pow_raw(a, e % group_order());
    }

    gf inverse(gf a) const {
        check(a);
        if (a == 0) throw std::domain_error("Field::inverse: zero has no inverse");
        if (tab_) {
            std::uint32_t l = tab_->log[a];
            return tab_->antilog[l == 0 ? 0 : group_order() - l];
        }
        return pow(a, group_order() - 1);
    }

    /// xi^k with k reduced mod 2^m - 1.
    gf xi_pow(std::uint64_t k) const {
        if (tab_) return tab_->antilog[k % group_order()];
        return pow(2u, k % group_order());
    }

    /// Half-trace over the odd Frobenius powers: sum of a^{2^l} for odd l in [1, m-2].
    gf half_trace_odd(gf a) const {
        check(a);
        gf acc = 0, cur = a;
        for (int l = 1; l <= m_ - 2; ++l) {
            cur = mul(cur, cur);
            if (l & 1) acc ^= cur;
        }
        return acc;
    }

    /// Roots of z + z^2 = lambda. Solvable iff Tr(lambda) = 0, in which case the
    /// two roots are the odd-power half-trace and its complement.
    std::optional<std::pair<gf, gf>> solve_artin_schreier(gf lambda) const {
        if (trace(lambda) != 0) return std::nullopt;
        gf z = half_trace_odd(lambda);
        return std::make_pair(z, z ^ 1u);
    }

    bool operator==(const Field& o) const { return m_ == o.m_ && poly_ == o.poly_; }
    bool operator!=(const Field& o) const { return !(*this == o); }

private:
    static constexpr int kMaxTableDegree = 21;

    struct Tables {
        std::vector<gf> antilog;        // antilog[k] = xi^k, k in [0, 2^m-2]
        std::vector<std::uint32_t> log; // log[antilog[k]] = k
    };

    void check(gf a) const {
        if (a > mask_) throw std::invalid_argument("Field: element outside GF(2^m)");
    }

    gf mul_shift_reduce(gf a, gf b) const {
        std::uint64_t acc = 0, aa = a;
        for (std::uint32_t bb = b; bb; bb >>= 1, aa <<= 1)
            if (bb & 1) acc ^= aa;
        const std::uint64_t g = poly_;
        for (int i = 2 * m_ - 2; i >= m_; --i)
            if ((acc >> i) & 1) acc ^= g << (i - m_);
        return static_cast<gf>(acc & mask_);
    }

    // Square-and-multiply without exponent reduction; the order check relies on this.
    gf pow_raw(gf a, std::uint64_t e) const {
        gf r = 1, base = a;
        for (; e; e >>= 1) {
            if (e & 1) r = mul_shift_reduce(r, base);
            base = mul_shift_reduce(base, base);
        }
        return r;
    }

    gf xi_to(int i) const { return tab_ ? tab_->antilog[i] : (i < m_ ? (1u << i) : pow(2u, i)); }

    void build_tables() {
        auto tab = std::make_shared<Tables>();
        const std::uint32_t ord = mask_;
        tab->antilog.resize(ord);
        tab->log.assign(std::size_t{1} << m_, 0);
        gf x = 1;
        for (std::uint32_t k = 0; k < ord; ++k) {
            if (k > 0 && x == 1)
                throw std::invalid_argument("Field: polynomial is not primitive (ord(xi) < 2^m - 1)");
            tab->antilog[k] = x;
            tab->log[x] = k;
            std::uint32_t nx = x << 1;
            if (nx >> m_) nx ^= poly_;
            x = nx & mask_;
        }
        if (x != 1)
            throw std::invalid_argument("Field: polynomial is not primitive");
        tab_ = std::move(tab);
    }

    void verify_order_factored() const {
        std::uint64_t n = group_order();
        std::vector<std::uint64_t> primes;
        std::uint64_t rem = n;
        for (std::uint64_t p = 2; p * p <= rem; ++p)
            if (rem % p == 0) {
                primes.push_back(p);
                while (rem % p == 0) rem /= p;
            }
        if (rem > 1) primes.push_back(rem);
        if (pow_raw(2u, n) != 1u)
            throw std::invalid_argument("Field: polynomial is not primitive");
        for (std::uint64_t p : primes)
            if (pow_raw(2u, n / p) == 1u)
                throw std::invalid_argument("Field: polynomial is not primitive (ord(xi) < 2^m - 1)");
    }

    int trace_by_squaring(gf a) const {
        gf acc = a, cur = a;
        for (int i = 1; i < m_; ++i) {
            cur = tab_ ? mul(cur, cur) : mul_shift_reduce(cur, cur);
            acc ^= cur;
        }
        return static_cast<int>(acc & 1u);
    }

    int m_;
    std::uint32_t poly_;
    std::uint32_t mask_;
    std::uint32_t trace_mask_ = 0;
    std::shared_ptr<const Tables> tab_;
};

}  // namespace dgsense
