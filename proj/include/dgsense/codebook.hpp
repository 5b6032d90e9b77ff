#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgsense/binsym.hpp"
#include "dgsense/field.hpp"

namespace dgsense {

class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Variant : std::uint8_t { frame = 0, sieve = 1 };

inline const char* variant_name(Variant v) { return v == Variant::frame ? "frame" : "sieve"; }

/// Fourth roots of unity: ipow(k) = i^k.
inline std::complex<double> ipow(int k) {
    static const std::complex<double> tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return tab[k & 3];
}

/// Description of a Delsarte-Goethals sensing matrix. Columns are indexed by
/// the little-endian concatenation (a_0 | a_1 | ... | a_r | b), m bits each;
/// sieves fix b = 0 and drop the trailing field.
struct CodebookSpec {
    int m = 3;
    int r = 0;
    Variant variant = Variant::frame;
    std::uint32_t primitive_poly = 0;
    std::vector<std::uint16_t> excluded_rows;  // sorted, unique, < 2^m

    static CodebookSpec make(int m, int r, Variant variant, std::uint32_t poly = 0) {
        CodebookSpec s;
        s.m = m;
        s.r = r;
        s.variant = variant;
        s.primitive_poly = poly ? poly : Field::default_poly(m);
        s.validate();
        return s;
    }

    void validate() const {
        if (m < 3 || m > 15 || m % 2 == 0)
            throw std::invalid_argument("CodebookSpec: m must be odd, 3 <= m <= 15");
        if (r < 0 || 2 * r > m - 1) throw std::invalid_argument("CodebookSpec: r out of [0, (m-1)/2]");
        if (!std::is_sorted(excluded_rows.begin(), excluded_rows.end()))
            throw std::invalid_argument("CodebookSpec: excluded rows must be sorted");
        if (std::adjacent_find(excluded_rows.begin(), excluded_rows.end()) != excluded_rows.end())
            throw std::invalid_argument("CodebookSpec: duplicate excluded row");
        for (auto x : excluded_rows)
            if (x >= (1u << m)) throw std::invalid_argument("CodebookSpec: excluded row out of range");
    }

    Field field() const { return Field(m, primitive_poly ? primitive_poly : Field::default_poly(m)); }

    std::uint32_t full_rows() const { return 1u << m; }
    std::uint32_t num_rows() const { return full_rows() - static_cast<std::uint32_t>(excluded_rows.size()); }
    std::uint64_t num_columns() const {
        int exp = (variant == Variant::frame ? r + 2 : r + 1) * m;
        return std::uint64_t{1} << exp;
    }
    double normalization() const { return 1.0 / std::sqrt(static_cast<double>(num_rows())); }
    double redundancy() const { return static_cast<double>(num_columns()) / num_rows(); }

    std::vector<std::uint32_t> kept_rows() const {
        std::vector<std::uint32_t> rows;
        rows.reserve(num_rows());
        std::size_t e = 0;
        for (std::uint32_t x = 0; x < full_rows(); ++x) {
            if (e < excluded_rows.size() && excluded_rows[e] == x) {
                ++e;
                continue;
            }
            rows.push_back(x);
        }
        return rows;
    }

    bool operator==(const CodebookSpec& o) const {
        return m == o.m && r == o.r && variant == o.variant && primitive_poly == o.primitive_poly &&
               excluded_rows == o.excluded_rows;
    }
};

/// Decoded column index.
struct ColumnIndex {
    std::vector<gf> coeffs;  // a_0 .. a_r
    std::uint32_t b = 0;
};

inline ColumnIndex decode_column_index(const CodebookSpec& spec, std::uint64_t col) {
    if (col >= spec.num_columns()) throw std::out_of_range("column index out of range");
    const std::uint32_t mask = (1u << spec.m) - 1u;
    ColumnIndex ci;
    ci.coeffs.resize(spec.r + 1);
    for (int t = 0; t <= spec.r; ++t) ci.coeffs[t] = static_cast<gf>((col >> (t * spec.m)) & mask);
    ci.b = spec.variant == Variant::frame
               ? static_cast<std::uint32_t>((col >> ((spec.r + 1) * spec.m)) & mask)
               : 0u;
    return ci;
}

/// Z4 exponents of one column over all 2^m rows: entry at x is
/// x P x^T + 2 b x^T mod 4. Gray-code sweep, O(1) per row.
inline void fill_exponents(const BinSymMatrix& P, std::uint32_t b, std::span<std::uint8_t> out) {
    const std::uint32_t n = 1u << P.m;
    std::uint32_t x = 0;
    int q = 0;
    out[0] = 0;
    for (std::uint32_t s = 1; s < n; ++s) {
        int i = std::countr_zero(s);
        int diag = (P.rows[i] >> i) & 1;
        int delta = diag * (1 - 2 * static_cast<int>((x >> i) & 1)) +
                    2 * std::popcount(P.rows[i] & x & ~(1u << i)) + 2 * static_cast<int>((b >> i) & 1);
        q = (q + delta + 4) & 3;
        x = s ^ (s >> 1);
        out[x] = static_cast<std::uint8_t>(q);
    }
}

struct ExponentColumn {
    std::vector<std::uint8_t> exponents;  // length 2^m, entries in Z4
};

inline ExponentColumn column(const CodebookSpec& spec, std::uint64_t col) {
    ColumnIndex ci = decode_column_index(spec, col);
    Field F = spec.field();
    BinSymMatrix P = dg_matrix(F, ci.coeffs);
    ExponentColumn ec;
    ec.exponents.resize(spec.full_rows());
    fill_exponents(P, ci.b, ec.exponents);
    return ec;
}

/// Streams every column's Z4 exponents to `fn(col, exponents)` without
/// rebuilding the field per column. Columns are visited in index order.
template <typename Fn>
void for_each_column(const CodebookSpec& spec, Fn&& fn) {
    Field F = spec.field();
    const std::uint64_t C = spec.num_columns();
    std::vector<std::uint8_t> exps(spec.full_rows());
    std::vector<gf> coeffs(spec.r + 1);
    const std::uint32_t mask = (1u << spec.m) - 1u;
    for (std::uint64_t col = 0; col < C; ++col) {
        for (int t = 0; t <= spec.r; ++t) coeffs[t] = static_cast<gf>((col >> (t * spec.m)) & mask);
        std::uint32_t b = spec.variant == Variant::frame
                              ? static_cast<std::uint32_t>((col >> ((spec.r + 1) * spec.m)) & mask)
                              : 0u;
        BinSymMatrix P = dg_matrix(F, coeffs);
        fill_exponents(P, b, exps);
        fn(col, std::span<const std::uint8_t>(exps));
    }
}

inline constexpr std::uint64_t kDenseBudgetEntries = std::uint64_t{1} << 28;

/// Dense N x C complex matrix, rows restricted to the kept set, columns unit-norm.
inline Eigen::MatrixXcd build_dense(const CodebookSpec& spec,
                                    std::uint64_t budget = kDenseBudgetEntries) {
    const std::uint64_t C = spec.num_columns();
    const std::uint32_t N = spec.num_rows();
    if (C * N > budget)
        throw std::length_error("build_dense: N*C exceeds the dense budget; use apply/apply_adjoint");
    auto rows = spec.kept_rows();
    Eigen::MatrixXcd M(N, static_cast<Eigen::Index>(C));
    const double scale = spec.normalization();
    for_each_column(spec, [&](std::uint64_t col, std::span<const std::uint8_t> exps) {
        auto c = M.col(static_cast<Eigen::Index>(col));
        for (std::uint32_t i = 0; i < N; ++i) c(i) = ipow(exps[rows[i]]) * scale;
    });
    return M;
}

namespace detail {

/// In-place Walsh-Hadamard transform, (Hv)[x] = sum_b (-1)^{parity(x & b)} v[b].
inline void fwht(std::complex<double>* v, std::size_t n) {
    for (std::size_t h = 1; h < n; h <<= 1)
        for (std::size_t i = 0; i < n; i += h << 1)
            for (std::size_t j = i; j < i + h; ++j) {
                auto u = v[j], w = v[j + h];
                v[j] = u + w;
                v[j + h] = u - w;
            }
}

}  // namespace detail

/// y = Phi v, streamed column-by-column (sieves) or per orthonormal-basis block
/// with a Walsh-Hadamard butterfly (frames). Both paths are exact.
inline Eigen::VectorXcd apply(const CodebookSpec& spec, const Eigen::VectorXcd& v) {
    const std::uint64_t C = spec.num_columns();
    if (static_cast<std::uint64_t>(v.size()) != C)
        throw std::invalid_argument("apply: dimension mismatch");
    const std::uint32_t N = spec.num_rows(), NF = spec.full_rows();
    auto rows = spec.kept_rows();
    const double scale = spec.normalization();
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(N);
    if (spec.variant == Variant::frame) {
        const std::uint64_t blocks = C >> spec.m;  // one per matrix P
        std::vector<std::complex<double>> vb(NF);
        Field F = spec.field();
        std::vector<std::uint8_t> exps(NF);
        std::vector<gf> coeffs(spec.r + 1);
        const std::uint32_t mask = (1u << spec.m) - 1u;
        for (std::uint64_t p = 0; p < blocks; ++p) {
            for (std::uint32_t b = 0; b < NF; ++b)
                vb[b] = v(static_cast<Eigen::Index>(p + (static_cast<std::uint64_t>(b) << ((spec.r + 1) * spec.m))));
            detail::fwht(vb.data(), NF);
            for (int t = 0; t <= spec.r; ++t) coeffs[t] = static_cast<gf>((p >> (t * spec.m)) & mask);
            BinSymMatrix P = dg_matrix(F, coeffs);
            fill_exponents(P, 0, exps);
            for (std::uint32_t i = 0; i < N; ++i) y(i) += ipow(exps[rows[i]]) * vb[rows[i]];
        }
        y *= scale;
        return y;
    }
    for_each_column(spec, [&](std::uint64_t col, std::span<const std::uint8_t> exps) {
        const std::complex<double> coef = v(static_cast<Eigen::Index>(col)) * scale;
        if (coef == std::complex<double>{0.0, 0.0}) return;
        for (std::uint32_t i = 0; i < N; ++i) y(i) += ipow(exps[rows[i]]) * coef;
    });
    return y;
}

/// u -> Phi^dagger u.
inline Eigen::VectorXcd apply_adjoint(const CodebookSpec& spec, const Eigen::VectorXcd& u) {
    const std::uint32_t N = spec.num_rows(), NF = spec.full_rows();
    if (static_cast<std::uint32_t>(u.size()) != N)
        throw std::invalid_argument("apply_adjoint: dimension mismatch");
    const std::uint64_t C = spec.num_columns();
    auto rows = spec.kept_rows();
    const double scale = spec.normalization();
    Eigen::VectorXcd out(static_cast<Eigen::Index>(C));
    if (spec.variant == Variant::frame) {
        const std::uint64_t blocks = C >> spec.m;
        std::vector<std::complex<double>> w(NF);
        Field F = spec.field();
        std::vector<std::uint8_t> exps(NF);
        std::vector<gf> coeffs(spec.r + 1);
        const std::uint32_t mask = (1u << spec.m) - 1u;
        for (std::uint64_t p = 0; p < blocks; ++p) {
            for (int t = 0; t <= spec.r; ++t) coeffs[t] = static_cast<gf>((p >> (t * spec.m)) & mask);
            BinSymMatrix P = dg_matrix(F, coeffs);
            fill_exponents(P, 0, exps);
            std::fill(w.begin(), w.end(), std::complex<double>{0.0, 0.0});
            for (std::uint32_t i = 0; i < N; ++i) w[rows[i]] = std::conj(ipow(exps[rows[i]])) * u(i);
            detail::fwht(w.data(), NF);
            for (std::uint32_t b = 0; b < NF; ++b)
                out(static_cast<Eigen::Index>(p + (static_cast<std::uint64_t>(b) << ((spec.r + 1) * spec.m)))) =
                    w[b] * scale;
        }
        return out;
    }
    for_each_column(spec, [&](std::uint64_t col, std::span<const std::uint8_t> exps) {
        std::complex<double> acc{0.0, 0.0};
        for (std::uint32_t i = 0; i < N; ++i) acc += std::conj(ipow(exps[rows[i]])) * u(i);
        out(static_cast<Eigen::Index>(col)) = acc * scale;
    });
    return out;
}

/// Adds the m+1 rows with non-vanishing column sums: x = 0 and the unit tuples
/// x = xi^j. Idempotent.
inline CodebookSpec exclude_power_rows(const CodebookSpec& spec) {
    if (spec.variant != Variant::sieve)
        throw std::invalid_argument("exclude_power_rows: only defined for sieves");
    CodebookSpec out = spec;
    std::vector<std::uint16_t> add;
    add.push_back(0);
    for (int j = 0; j < spec.m; ++j) add.push_back(static_cast<std::uint16_t>(1u << j));
    out.excluded_rows.insert(out.excluded_rows.end(), add.begin(), add.end());
    std::sort(out.excluded_rows.begin(), out.excluded_rows.end());
    out.excluded_rows.erase(std::unique(out.excluded_rows.begin(), out.excluded_rows.end()),
                            out.excluded_rows.end());
    out.validate();
    return out;
}

// --- binary codebook-spec file -------------------------------------------------
//
// magic "DGCS" | u16 version | u8 m | u8 r | u8 variant | u32 primitive_poly |
// u16 excluded count | u16 sorted excluded rows. All integers little-endian.

inline constexpr std::uint16_t kSpecFormatVersion = 1;

inline std::vector<std::uint8_t> serialize(const CodebookSpec& spec) {
    spec.validate();
    std::vector<std::uint8_t> out;
    auto put16 = [&](std::uint16_t v) {
        out.push_back(v & 0xff);
        out.push_back(v >> 8);
    };
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
    };
    out.insert(out.end(), {'D', 'G', 'C', 'S'});
    put16(kSpecFormatVersion);
    out.push_back(static_cast<std::uint8_t>(spec.m));
    out.push_back(static_cast<std::uint8_t>(spec.r));
    out.push_back(static_cast<std::uint8_t>(spec.variant));
    put32(spec.primitive_poly);
    put16(static_cast<std::uint16_t>(spec.excluded_rows.size()));
    for (auto x : spec.excluded_rows) put16(x);
    return out;
}

inline CodebookSpec deserialize(std::span<const std::uint8_t> bytes) {
    auto need = [&](std::size_t n, std::size_t at) {
        if (at + n > bytes.size()) throw format_error("codebook spec: truncated file");
    };
    need(11, 0);
    if (std::memcmp(bytes.data(), "DGCS", 4) != 0) throw format_error("codebook spec: bad magic");
    auto get16 = [&](std::size_t at) {
        return static_cast<std::uint16_t>(bytes[at] | (bytes[at + 1] << 8));
    };
    std::uint16_t version = get16(4);
    if (version != kSpecFormatVersion)
        throw format_error("codebook spec: unsupported version " + std::to_string(version));
    CodebookSpec spec;
    spec.m = bytes[6];
    spec.r = bytes[7];
    if (bytes[8] > 1) throw format_error("codebook spec: bad variant byte");
    spec.variant = static_cast<Variant>(bytes[8]);
    spec.primitive_poly = 0;
    for (int i = 0; i < 4; ++i) spec.primitive_poly |= static_cast<std::uint32_t>(bytes[9 + i]) << (8 * i);
    std::uint16_t count = get16(13);
    need(static_cast<std::size_t>(count) * 2, 15);
    spec.excluded_rows.resize(count);
    for (std::uint16_t i = 0; i < count; ++i) spec.excluded_rows[i] = get16(15 + 2 * i);
    try {
        spec.validate();
        spec.field();
    } catch (const std::invalid_argument& e) {
        throw format_error(std::string("codebook spec: ") + e.what());
    }
    return spec;
}

/// FNV-1a over the serialized bytes, as a hex string.
inline std::string digest(const CodebookSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : serialize(spec)) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// CSV export: one line per row, "re,im" per entry, row-major.
inline void write_dense_csv(const Eigen::MatrixXcd& M, std::ostream& os) {
    os.precision(17);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) os << ',';
            os << M(i, j).real() << ',' << M(i, j).imag();
        }
        os << '\n';
    }
}

}  // namespace dgsense
