#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "dgsense/sieve.hpp"
#include "dgsense/weights.hpp"

using namespace dgsense;

TEST_CASE("krawtchouk base cases") {
    for (std::uint64_t N : {8, 32, 128}) {
        for (std::uint64_t z = 0; z <= N; ++z) {
            REQUIRE(krawtchouk(0, z, N) == 1);
            REQUIRE(krawtchouk(1, z, N) == (long long)(N - 2 * z));
            long long nz = (long long)N - 2 * (long long)z;
            REQUIRE(krawtchouk(2, z, N) == (nz * nz - (long long)N) / 2);
        }
    }
    REQUIRE_THROWS_AS(krawtchouk(9, 0, 8), std::invalid_argument);
    REQUIRE_THROWS_AS(krawtchouk(64, 32, 128), std::overflow_error);
    REQUIRE(krawtchouk_big(64, 32, 128) > 0);
}

TEST_CASE("krawtchouk orthogonality for short lengths") {
    for (std::uint64_t N : {8, 12, 16}) {
        for (std::uint64_t a = 0; a <= N; ++a)
            for (std::uint64_t b = a; b <= N; ++b) {
                bigint acc = 0;
                for (std::uint64_t z = 0; z <= N; ++z)
                    acc += detail::binomial(N, z) * krawtchouk_big(a, z, N) * krawtchouk_big(b, z, N);
                bigint expect = a == b ? (bigint(1) << N) * detail::binomial(N, a) : 0;
                REQUIRE(acc == expect);
            }
    }
}

TEST_CASE("DG_0(m,1) has exactly the four predicted weights") {
    for (int m : {5, 7, 9}) {
        Field F = Field::with_default_poly(m);
        auto d = enumerate_dg0_weights(F, 1);
        const std::uint32_t half = 1u << (m - 1), gap = 1u << ((m - 1) / 2);
        REQUIRE(d.counts.size() == 4);
        REQUIRE(d.counts.count(0) == 1);
        REQUIRE(d.counts.at(0) == 1);
        REQUIRE(d.counts.count(half - gap) == 1);
        REQUIRE(d.counts.count(half) == 1);
        REQUIRE(d.counts.count(half + gap) == 1);
        // 1 + t + s + t' = 2^m and t - t' = m 2^{(m-1)/2}
        bigint total = d.code_size();
        REQUIRE(total == (bigint(1) << m));
        bigint t = d.counts.at(half - gap), tp = d.counts.at(half + gap);
        REQUIRE(t - tp == bigint(m) * gap);
    }
}

TEST_CASE("S^2 dichotomy: Kerdock sums of the zero-diagonal code") {
    // S = sum_x i^{x P x^T} is real for zero-diagonal P and S^2 is 0 or 2^{m+1}
    for (int m : {5, 7, 9}) {
        Field F = Field::with_default_poly(m);
        for (gf a = 1; a < F.size(); ++a) {
            BinSymMatrix P = form_matrix(F, 1, a);
            long long s = 0;
            for (std::uint32_t x = 0; x < F.size(); ++x)
                s += quad_form_z4(P, x) == 0 ? 1 : -1;  // values in {0,2} -> i^q = +-1
            REQUIRE((s * s == 0 || s * s == (1ll << (m + 1))));
        }
    }
}

TEST_CASE("MacWilliams identities for DG_0(m,1)") {
    for (int m : {5, 7, 9}) {
        Field F = Field::with_default_poly(m);
        auto d = enumerate_dg0_weights(F, 1);
        REQUIRE(weight1_dual_count(d, 1) == m + 1);
        auto cf = closed_form_c1_count(F);
        REQUIRE(c1_count_macwilliams(d, 1) == cf.count);
        REQUIRE(cf.s >= 0);
        REQUIRE(cf.t >= 0);
        REQUIRE(cf.t_prime >= 0);
        REQUIRE(1 + cf.t + cf.s + cf.t_prime == (1ll << m));
    }
}

TEST_CASE("C1 counts agree with direct enumeration") {
    for (int m : {5, 7}) {
        Field F = Field::with_default_poly(m);
        long long direct = 0;
        for (gf e = 1; e < F.size(); ++e)
            if (!c1_solve(F, e, 1).empty()) ++direct;
        auto cf = closed_form_c1_count(F);
        REQUIRE(direct == cf.count);
        // C2 only filters: the C1 count dominates the pair count
        auto rep = find_nonorthogonal_pairs(F, 1, false);
        REQUIRE(direct >= static_cast<long long>(rep.pairs.size()));
    }
}

TEST_CASE("all-duplicate code sanity: W_0 = size gives N(N-1)/2 pairs") {
    WeightDistribution d;
    d.m = 5;
    d.r = 1;
    d.length = 32;
    d.counts[0] = bigint(1) << 5;
    REQUIRE(c1_count_macwilliams(d, 1) == 32 * 31 / 2);
}

TEST_CASE("invariant violations are reported") {
    WeightDistribution d;
    d.m = 5;
    d.r = 1;
    d.length = 32;
    d.counts[0] = 1;
    d.counts[15] = 31;  // odd weight breaks divisibility
    REQUIRE_THROWS_AS(c1_count_macwilliams(d, 1), invariant_error);
    WeightDistribution wrong_size;
    wrong_size.m = 5;
    wrong_size.r = 1;
    wrong_size.length = 32;
    wrong_size.counts[0] = 7;
    REQUIRE_THROWS_AS(c1_count_macwilliams(wrong_size, 1), invariant_error);
}

TEST_CASE("weight cache round-trips") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "dgsense-weight-cache-test";
    fs::remove_all(dir);
    Field F = Field::with_default_poly(7);
    auto fresh = enumerate_dg0_weights(F, 1, dir);
    REQUIRE(fs::exists(dir));
    auto cached = enumerate_dg0_weights(F, 1, dir);
    REQUIRE(fresh.counts == cached.counts);
    fs::remove_all(dir);
}

TEST_CASE("enumeration bounds") {
    Field F = Field::with_default_poly(5);
    REQUIRE_THROWS_AS(enumerate_dg0_weights(F, 0), std::invalid_argument);
    Field F15 = Field::with_default_poly(15);
    REQUIRE_THROWS_AS(enumerate_dg0_weights(F15, 2), std::length_error);
}
