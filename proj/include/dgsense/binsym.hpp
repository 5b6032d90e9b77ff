#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dgsense/field.hpp"

namespace dgsense {

/// m x m symmetric matrix over F2, stored as m packed bit-rows.
struct BinSymMatrix {
    int m = 0;
    std::vector<std::uint32_t> rows;

    BinSymMatrix() = default;
    explicit BinSymMatrix(int dim) : m(dim), rows(static_cast<std::size_t>(dim), 0u) {}

    int bit(int i, int j) const { return (rows[i] >> j) & 1; }
    void set_bit(int i, int j) {
        rows[i] |= 1u << j;
        rows[j] |= 1u << i;
    }

    bool operator==(const BinSymMatrix& o) const { return m == o.m && rows == o.rows; }
    bool operator!=(const BinSymMatrix& o) const { return !(*this == o); }

    BinSymMatrix& operator^=(const BinSymMatrix& o) {
        if (m != o.m) throw std::invalid_argument("BinSymMatrix: dimension mismatch");
        for (int i = 0; i < m; ++i) rows[i] ^= o.rows[i];
        return *this;
    }

    bool is_zero() const {
        for (auto r : rows)
            if (r) return false;
        return true;
    }

    /// Packed diagonal: bit i = entry (i,i).
    std::uint32_t diag_mask() const {
        std::uint32_t d = 0;
        for (int i = 0; i < m; ++i) d |= ((rows[i] >> i) & 1u) << i;
        return d;
    }
};

/// The bilinear-form matrix P^t(a): Tr[(x y^{2^t} + x^{2^t} y) a] for t >= 1,
/// and Tr[x y a] for t = 0. Matrices with t >= 1 have zero diagonal.
inline BinSymMatrix form_matrix(const Field& F, int t, gf a) {
    const int m = F.m();
    if (t < 0 || 2 * t > m - 1)
        throw std::invalid_argument("form_matrix: t out of range [0, (m-1)/2]");
    BinSymMatrix P(m);
    if (a == 0) return P;
    std::vector<gf> xi(m), xit(m);
    for (int i = 0; i < m; ++i) {
        xi[i] = F.xi_pow(i);
        xit[i] = F.frob_pow(xi[i], t);
    }
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            gf u = t == 0 ? F.mul(xi[i], xi[j])
                          : static_cast<gf>(F.mul(xi[i], xit[j]) ^ F.mul(xit[i], xi[j]));
            if (F.trace(F.mul(u, a))) P.set_bit(i, j);
        }
    return P;
}

/// Sum over t of P^t(a_t); coeffs[t] is the coefficient of the t-th form.
inline BinSymMatrix dg_matrix(const Field& F, std::span<const gf> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("dg_matrix: empty coefficient list");
    if (2 * (static_cast<int>(coeffs.size()) - 1) > F.m() - 1)
        throw std::invalid_argument("dg_matrix: r exceeds (m-1)/2");
    BinSymMatrix P(F.m());
    for (std::size_t t = 0; t < coeffs.size(); ++t)
        P ^= form_matrix(F, static_cast<int>(t), coeffs[t]);
    return P;
}

/// Rank over F2 by bitwise elimination.
inline int rank_gf2(const BinSymMatrix& P) {
    std::vector<std::uint32_t> rows = P.rows;
    int rank = 0;
    for (int col = 0; col < P.m && rank < P.m; ++col) {
        int pivot = -1;
        for (int i = rank; i < P.m; ++i)
            if ((rows[i] >> col) & 1) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int i = 0; i < P.m; ++i)
            if (i != rank && ((rows[i] >> col) & 1)) rows[i] ^= rows[rank];
        ++rank;
    }
    return rank;
}

/// All x with x P = 0 (row-vector convention; P symmetric, so also P x^T = 0).
inline std::vector<gf> null_space(const BinSymMatrix& P) {
    const int m = P.m;
    std::vector<std::uint32_t> rows = P.rows;
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < m && rank < m; ++col) {
        int pivot = -1;
        for (int i = rank; i < m; ++i)
            if ((rows[i] >> col) & 1) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int i = 0; i < m; ++i)
            if (i != rank && ((rows[i] >> col) & 1)) rows[i] ^= rows[rank];
        pivot_col.push_back(col);
        ++rank;
    }
    std::vector<gf> basis;
    std::vector<bool> is_pivot(m, false);
    for (int c : pivot_col) is_pivot[c] = true;
    for (int free = 0; free < m; ++free) {
        if (is_pivot[free]) continue;
        gf v = 1u << free;
        for (int i = 0; i < rank; ++i)
            if ((rows[i] >> free) & 1) v |= 1u << pivot_col[i];
        basis.push_back(v);
    }
    std::vector<gf> out;
    out.reserve(std::size_t{1} << basis.size());
    out.push_back(0);
    for (gf b : basis) {
        std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] ^ b);
    }
    return out;
}

/// x P x^T in Z4: the diagonal counts once, off-diagonal pairs count twice.
inline int quad_form_z4(const BinSymMatrix& P, std::uint32_t x) {
    int diag = 0, off = 0;
    std::uint32_t xs = x;
    while (xs) {
        int i = std::countr_zero(xs);
        xs &= xs - 1;
        std::uint32_t row = P.rows[i] & x;
        diag += (row >> i) & 1;
        off += std::popcount(row >> (i + 1));
    }
    return (diag + 2 * off) & 3;
}

/// x P y^T over F2.
inline int bilinear_gf2(const BinSymMatrix& P, std::uint32_t x, std::uint32_t y) {
    int acc = 0;
    std::uint32_t xs = x;
    while (xs) {
        int i = std::countr_zero(xs);
        xs &= xs - 1;
        acc ^= std::popcount(P.rows[i] & y) & 1;
    }
    return acc;
}

}  // namespace dgsense
