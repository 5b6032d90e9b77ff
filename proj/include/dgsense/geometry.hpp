#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "dgsense/codebook.hpp"
#include "dgsense/parallel.hpp"
#include "dgsense/sieve.hpp"

namespace dgsense {

inline double welch_bound(double n, double c) { return std::sqrt((c - n) / (n * (c - 1.0))); }

struct FrameStats {
    int m = 0, r = 0;
    Variant variant = Variant::frame;
    std::uint32_t rows = 0;
    std::uint64_t cols = 0;
    double coherence = 0;
    bool coherence_exhaustive = true;
    std::uint64_t coherence_pairs = 0;
    double spectral_norm = 0;
    double tight_residual = 0;
    double welch = 0;
};

struct CoherenceOptions {
    std::uint64_t exhaustive_pair_budget = 30'000'000;  // pairs
    std::uint64_t sample_pairs = 1'000'000;
    std::uint64_t seed = 0x5eedc0deULL;
};

struct CoherenceResult {
    double value = 0;
    bool exhaustive = true;
    std::uint64_t pairs_checked = 0;
};

namespace detail {

/// |<phi_i, phi_j>| from two exponent columns over the kept rows; the counting
/// is exact in integers.
inline double column_coherence(std::span<const std::uint8_t> ei, std::span<const std::uint8_t> ej,
                               std::span<const std::uint32_t> rows) {
    long long n[4] = {0, 0, 0, 0};
    for (auto x : rows) ++n[(ej[x] - ei[x] + 4) & 3];
    double re = static_cast<double>(n[0] - n[2]);
    double im = static_cast<double>(n[1] - n[3]);
    return std::sqrt(re * re + im * im) / static_cast<double>(rows.size());
}

}  // namespace detail

/// Worst-case coherence: exact maximum over all column pairs when the pair
/// count fits the budget, otherwise a seeded lower bound over sampled pairs.
inline CoherenceResult coherence(const CodebookSpec& spec, const CoherenceOptions& opts = {}) {
    const std::uint64_t C = spec.num_columns();
    const auto rows = spec.kept_rows();
    Field F = spec.field();
    const std::uint64_t all_pairs = C * (C - 1) / 2;
    CoherenceResult res;
    std::vector<std::uint8_t> scratch_i(spec.full_rows()), scratch_j(spec.full_rows());
    std::vector<gf> coeffs(spec.r + 1);
    const std::uint32_t mask = (1u << spec.m) - 1u;
    auto fill = [&](std::uint64_t col, std::vector<std::uint8_t>& out) {
        for (int t = 0; t <= spec.r; ++t) coeffs[t] = static_cast<gf>((col >> (t * spec.m)) & mask);
        std::uint32_t b = spec.variant == Variant::frame
                              ? static_cast<std::uint32_t>((col >> ((spec.r + 1) * spec.m)) & mask)
                              : 0u;
        BinSymMatrix P = dg_matrix(F, coeffs);
        fill_exponents(P, b, out);
    };
    if (all_pairs <= opts.exhaustive_pair_budget) {
        res.exhaustive = true;
        res.pairs_checked = all_pairs;
        // materialize all exponent columns (small C in the exhaustive regime)
        std::vector<std::vector<std::uint8_t>> cols(C);
        for (std::uint64_t j = 0; j < C; ++j) {
            cols[j].resize(spec.full_rows());
            fill(j, cols[j]);
        }
        double best = 0;
        for (std::uint64_t i = 0; i < C; ++i)
            for (std::uint64_t j = i + 1; j < C; ++j)
                best = std::max(best, detail::column_coherence(cols[i], cols[j], rows));
        res.value = best;
        return res;
    }
    res.exhaustive = false;
    res.pairs_checked = opts.sample_pairs;
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, C - 1);
    double best = 0;
    for (std::uint64_t s = 0; s < opts.sample_pairs; ++s) {
        std::uint64_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        fill(i, scratch_i);
        fill(j, scratch_j);
        best = std::max(best, detail::column_coherence(scratch_i, scratch_j, rows));
    }
    res.value = best;
    return res;
}

struct SpectralNormResult {
    double value = 0;
    int iterations = 0;
    bool converged = false;
    double rayleigh_delta = 0;
};

/// Largest singular value by power iteration on the N x N operator Phi Phi^dag
/// (assembled by column streaming or the character-sum factorization). The
/// start vector is a fixed-seed pseudorandom draw; iteration stops when the
/// Rayleigh quotient moves by less than 1e-12 relative or at 10^4 iterations.
inline SpectralNormResult spectral_norm(const CodebookSpec& spec) {
    Eigen::MatrixXcd G = detail::row_gram_auto(spec);
    const Eigen::Index n = G.rows();
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss;
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = {gauss(rng), gauss(rng)};
    v.normalize();
    SpectralNormResult res;
    double lambda_prev = 0;
    for (res.iterations = 1; res.iterations <= 10000; ++res.iterations) {
        Eigen::VectorXcd w = G * v;
        double lambda = std::real(v.dot(w));
        res.rayleigh_delta = std::abs(lambda - lambda_prev);
        double nw = w.norm();
        if (nw == 0) {
            res.value = 0;
            res.converged = true;
            return res;
        }
        v = w / nw;
        if (res.rayleigh_delta < 1e-12 * std::max(1.0, std::abs(lambda))) {
            res.value = std::sqrt(std::max(lambda, 0.0));
            res.converged = true;
            return res;
        }
        lambda_prev = lambda;
    }
    res.value = std::sqrt(std::max(lambda_prev, 0.0));
    return res;
}

/// ||Phi Phi^dag - (C/N) I|| (spectral norm of the residual).
inline double tight_residual(const CodebookSpec& spec) {
    Eigen::MatrixXcd G = detail::row_gram_auto(spec);
    return tight_residual_of_gram(G, spec.redundancy());
}

inline FrameStats analyze(const CodebookSpec& spec, const CoherenceOptions& opts = {}) {
    FrameStats st;
    st.m = spec.m;
    st.r = spec.r;
    st.variant = spec.variant;
    st.rows = spec.num_rows();
    st.cols = spec.num_columns();
    auto coh = coherence(spec, opts);
    st.coherence = coh.value;
    st.coherence_exhaustive = coh.exhaustive;
    st.coherence_pairs = coh.pairs_checked;
    st.spectral_norm = spectral_norm(spec).value;
    st.tight_residual = tight_residual(spec);
    st.welch = welch_bound(st.rows, static_cast<double>(st.cols));
    return st;
}

/// Column access shared by DG codebooks and dense reference matrices.
struct ColumnSource {
    std::uint32_t rows = 0;
    std::uint64_t cols = 0;
    std::function<void(std::uint64_t, Eigen::VectorXcd&)> fill;

    static ColumnSource from_spec(const CodebookSpec& spec) {
        auto field = std::make_shared<Field>(spec.field());
        auto kept = std::make_shared<std::vector<std::uint32_t>>(spec.kept_rows());
        ColumnSource src;
        src.rows = spec.num_rows();
        src.cols = spec.num_columns();
        src.fill = [spec, field, kept](std::uint64_t col, Eigen::VectorXcd& out) {
            const std::uint32_t mask = (1u << spec.m) - 1u;
            std::vector<gf> coeffs(spec.r + 1);
            for (int t = 0; t <= spec.r; ++t) coeffs[t] = static_cast<gf>((col >> (t * spec.m)) & mask);
            std::uint32_t b = spec.variant == Variant::frame
                                  ? static_cast<std::uint32_t>((col >> ((spec.r + 1) * spec.m)) & mask)
                                  : 0u;
            BinSymMatrix P = dg_matrix(*field, coeffs);
            std::vector<std::uint8_t> exps(std::size_t{1} << spec.m);
            fill_exponents(P, b, exps);
            const double scale = spec.normalization();
            out.resize(kept->size());
            for (std::size_t i = 0; i < kept->size(); ++i) out(i) = ipow(exps[(*kept)[i]]) * scale;
        };
        return src;
    }

    static ColumnSource from_matrix(std::shared_ptr<const Eigen::MatrixXcd> M) {
        ColumnSource src;
        src.rows = static_cast<std::uint32_t>(M->rows());
        src.cols = static_cast<std::uint64_t>(M->cols());
        src.fill = [M](std::uint64_t col, Eigen::VectorXcd& out) {
            out = M->col(static_cast<Eigen::Index>(col));
        };
        return src;
    }
};

struct SubdictStats {
    int k = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    double mean_hollow_gram_norm = 0;
    double mean_nuclear_norm_over_k = 0;
    double rank_deficient_fraction = 0;
    double hollow_gram_norm_stderr = 0;
    std::vector<std::uint64_t> singular_value_histogram;  // 40 bins over [0, 2), last bin catches >= 2
};

inline constexpr int kSingularHistBins = 40;
inline constexpr double kRankDeficiencyTol = 1e-8;

/// Statistics of random k-column subdictionaries: mean hollow-Gram spectral
/// norm, mean nuclear norm over k, and the fraction of rank-deficient draws.
inline SubdictStats subdict_stats(const ColumnSource& src, int k, int trials, std::uint64_t seed,
                                  int workers = 1) {
    if (k < 1 || static_cast<std::uint64_t>(k) > src.cols)
        throw std::invalid_argument("subdict_stats: k out of range");
    if (trials < 1) throw std::invalid_argument("subdict_stats: trials >= 1 required");
    std::vector<double> hollow(trials), nuclear(trials);
    std::vector<int> deficient(trials);
    std::vector<std::vector<std::uint64_t>> hists(trials);
    parallel_for_index(trials, workers, [&](std::uint64_t trial) {
        std::mt19937_64 rng(mix_seed(seed, trial));
        std::uniform_int_distribution<std::uint64_t> pick(0, src.cols - 1);
        std::vector<std::uint64_t> idx;
        idx.reserve(k);
        while (static_cast<int>(idx.size()) < k) {
            std::uint64_t c = pick(rng);
            if (std::find(idx.begin(), idx.end(), c) == idx.end()) idx.push_back(c);
        }
        Eigen::MatrixXcd S(src.rows, k);
        Eigen::VectorXcd col;
        for (int j = 0; j < k; ++j) {
            src.fill(idx[j], col);
            S.col(j) = col;
        }
        Eigen::MatrixXcd gram = S.adjoint() * S;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        double h = 0, nuc = 0, smin = std::numeric_limits<double>::max();
        std::vector<std::uint64_t> hist(kSingularHistBins, 0);
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            double lam = std::max(ev(i), 0.0);
            double sv = std::sqrt(lam);
            h = std::max(h, std::abs(ev(i) - 1.0));
            nuc += sv;
            smin = std::min(smin, sv);
            int bin = std::min(kSingularHistBins - 1, static_cast<int>(sv / 2.0 * kSingularHistBins));
            ++hist[bin];
        }
        hollow[trial] = h;
        nuclear[trial] = nuc / k;
        deficient[trial] = smin <= kRankDeficiencyTol ? 1 : 0;
        hists[trial] = std::move(hist);
    });
    SubdictStats st;
    st.k = k;
    st.trials = trials;
    st.seed = seed;
    st.singular_value_histogram.assign(kSingularHistBins, 0);
    double sh = 0, sh2 = 0, sn = 0;
    long long nd = 0;
    for (int t = 0; t < trials; ++t) {
        sh += hollow[t];
        sh2 += hollow[t] * hollow[t];
        sn += nuclear[t];
        nd += deficient[t];
        for (int b = 0; b < kSingularHistBins; ++b) st.singular_value_histogram[b] += hists[t][b];
    }
    st.mean_hollow_gram_norm = sh / trials;
    st.mean_nuclear_norm_over_k = sn / trials;
    st.rank_deficient_fraction = static_cast<double>(nd) / trials;
    double var = std::max(0.0, sh2 / trials - st.mean_hollow_gram_norm * st.mean_hollow_gram_norm);
    st.hollow_gram_norm_stderr = std::sqrt(var / trials);
    return st;
}

/// Ensemble of iid standard-normal N x C matrices with unit-norm columns,
/// generated on demand; member i depends only on (seed, i).
struct GaussianEnsemble {
    std::uint32_t rows = 0;
    std::uint64_t cols = 0;
    int count = 0;
    std::uint64_t seed = 0;

    Eigen::MatrixXcd member(int i) const {
        if (i < 0 || i >= count) throw std::out_of_range("GaussianEnsemble: bad member index");
        std::mt19937_64 rng(mix_seed(seed, 0x6a755u + i));
        std::normal_distribution<double> gauss;
        Eigen::MatrixXcd M(rows, static_cast<Eigen::Index>(cols));
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            for (Eigen::Index x = 0; x < M.rows(); ++x) M(x, j) = gauss(rng);
            M.col(j).normalize();
        }
        return M;
    }
};

inline GaussianEnsemble gaussian_reference(std::uint32_t N, std::uint64_t C, int count,
                                           std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("gaussian_reference: count >= 1 required");
    return GaussianEnsemble{N, C, count, seed};
}

/// Median of per-member values; pass a functor evaluated on each member.
template <typename Fn>
double ensemble_median(const GaussianEnsemble& ens, Fn&& fn) {
    std::vector<double> vals(ens.count);
    for (int i = 0; i < ens.count; ++i) vals[i] = fn(ens.member(i), i);
    std::sort(vals.begin(), vals.end());
    int n = ens.count;
    return n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
}

}  // namespace dgsense
