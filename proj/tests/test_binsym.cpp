#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "dgsense/binsym.hpp"
#include "dgsense/field.hpp"

using namespace dgsense;

namespace {

BinSymMatrix from_rows(std::initializer_list<std::initializer_list<int>> vals) {
    BinSymMatrix P(static_cast<int>(vals.size()));
    int i = 0;
    for (auto& row : vals) {
        int j = 0;
        for (int v : row) {
            if (v) P.rows[i] |= 1u << j;
            ++j;
        }
        ++i;
    }
    return P;
}

}  // namespace

TEST_CASE("m=3 spanning matrices match the worked example") {
    Field F = Field::with_default_poly(3);
    // Kerdock set K_3 generators
    REQUIRE(form_matrix(F, 0, 0b001) == from_rows({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}));
    REQUIRE(form_matrix(F, 0, 0b010) == from_rows({{0, 0, 1}, {0, 1, 0}, {1, 0, 1}}));
    REQUIRE(form_matrix(F, 0, 0b100) == from_rows({{0, 1, 0}, {1, 0, 1}, {0, 1, 1}}));
    // t = 1 generators of DG(3,1)
    REQUIRE(form_matrix(F, 1, 0b001) == from_rows({{0, 0, 0}, {0, 0, 1}, {0, 1, 0}}));
    REQUIRE(form_matrix(F, 1, 0b010) == from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}));
    REQUIRE(form_matrix(F, 1, 0b100) == from_rows({{0, 1, 1}, {1, 0, 0}, {1, 0, 0}}));
}

TEST_CASE("form_matrix basics") {
    Field F = Field::with_default_poly(5);
    SECTION("zero coefficient gives the zero matrix") {
        for (int t = 0; t <= 2; ++t) REQUIRE(form_matrix(F, t, 0).is_zero());
    }
    SECTION("t out of range throws") {
        REQUIRE_THROWS_AS(form_matrix(F, 3, 1), std::invalid_argument);
        REQUIRE_THROWS_AS(form_matrix(F, -1, 1), std::invalid_argument);
    }
    SECTION("symmetry and zero diagonal for t >= 1") {
        for (int t = 1; t <= 2; ++t)
            for (gf a = 0; a < F.size(); ++a) {
                BinSymMatrix P = form_matrix(F, t, a);
                REQUIRE(P.diag_mask() == 0);
                for (int i = 0; i < 5; ++i)
                    for (int j = 0; j < 5; ++j) REQUIRE(P.bit(i, j) == P.bit(j, i));
            }
    }
}

TEST_CASE("bilinear identity x P^t(a) y^T = Tr[(x y^{2^t} + x^{2^t} y) a]") {
    std::mt19937 rng(7);
    for (int m : {3, 5, 7}) {
        Field F = Field::with_default_poly(m);
        for (int rep = 0; rep < 4; ++rep) {
            int t = static_cast<int>(rng() % (static_cast<unsigned>(m - 1) / 2 + 1));
            gf a = static_cast<gf>(rng() & F.elem_mask());
            BinSymMatrix P = form_matrix(F, t, a);
            for (gf x = 0; x < F.size(); ++x)
                for (gf y = 0; y < F.size(); ++y) {
                    gf u = t == 0 ? F.mul(x, y)
                                  : static_cast<gf>(F.mul(x, F.frob_pow(y, t)) ^
                                                    F.mul(F.frob_pow(x, t), y));
                    REQUIRE(bilinear_gf2(P, x, y) == F.trace(F.mul(u, a)));
                }
        }
    }
}

TEST_CASE("dg_matrix composition") {
    Field F = Field::with_default_poly(3);
    SECTION("all-zero coefficients give the zero matrix") {
        std::vector<gf> cs{0, 0};
        REQUIRE(dg_matrix(F, cs).is_zero());
    }
    SECTION("r=0 reduces to the Kerdock form") {
        for (gf a = 0; a < F.size(); ++a) {
            std::vector<gf> cs{a};
            REQUIRE(dg_matrix(F, cs) == form_matrix(F, 0, a));
        }
    }
    SECTION("worked XOR example") {
        std::vector<gf> cs{0b001, 0b001};  // a_0 = a_1 = (1,0,0)
        REQUIRE(dg_matrix(F, cs) == from_rows({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}));
    }
    SECTION("additivity in each coefficient slot") {
        Field F5 = Field::with_default_poly(5);
        std::mt19937 rng(11);
        for (int rep = 0; rep < 50; ++rep) {
            gf a0 = static_cast<gf>(rng() & F5.elem_mask());
            gf a1 = static_cast<gf>(rng() & F5.elem_mask());
            gf b1 = static_cast<gf>(rng() & F5.elem_mask());
            std::vector<gf> u{a0, a1}, v{0, b1}, w{a0, static_cast<gf>(a1 ^ b1)};
            BinSymMatrix lhs = dg_matrix(F5, u);
            lhs ^= dg_matrix(F5, v);
            REQUIRE(lhs == dg_matrix(F5, w));
        }
    }
}

TEST_CASE("DG sets are nested and have full cardinality") {
    for (int m : {3, 5}) {
        Field F = Field::with_default_poly(m);
        std::set<std::vector<std::uint32_t>> dg0, dg1;
        for (gf a = 0; a < F.size(); ++a) {
            std::vector<gf> cs{a};
            dg0.insert(dg_matrix(F, cs).rows);
        }
        for (gf a = 0; a < F.size(); ++a)
            for (gf b = 0; b < F.size(); ++b) {
                std::vector<gf> cs{a, b};
                dg1.insert(dg_matrix(F, cs).rows);
            }
        REQUIRE(dg0.size() == F.size());
        REQUIRE(dg1.size() == F.size() * F.size());
        for (const auto& rows : dg0) REQUIRE(dg1.count(rows) == 1);
    }
}

TEST_CASE("rank: Kerdock matrices are nonsingular") {
    BinSymMatrix z(4);
    REQUIRE(rank_gf2(z) == 0);
    for (int m : {3, 5, 7, 9}) {
        Field F = Field::with_default_poly(m);
        for (gf a = 1; a < F.size(); ++a) REQUIRE(rank_gf2(form_matrix(F, 0, a)) == m);
    }
}

TEST_CASE("rank: DG(7,1) matrices have rank at least m-2r") {
    Field F = Field::with_default_poly(7);
    for (gf a = 0; a < F.size(); ++a)
        for (gf b = 0; b < F.size(); ++b) {
            if (a == 0 && b == 0) continue;
            std::vector<gf> cs{a, b};
            REQUIRE(rank_gf2(dg_matrix(F, cs)) >= 5);
        }
}

TEST_CASE("null spaces") {
    SECTION("zero matrix has the full space") {
        for (int m : {3, 5}) {
            BinSymMatrix z(m);
            REQUIRE(null_space(z).size() == (std::size_t{1} << m));
        }
    }
    SECTION("nonzero Kerdock matrices have trivial null space") {
        Field F = Field::with_default_poly(5);
        for (gf a = 1; a < F.size(); ++a) {
            auto ns = null_space(form_matrix(F, 0, a));
            REQUIRE(ns == std::vector<gf>{0});
        }
    }
    SECTION("P^1(a) has null space {0, a^{-1/3}}") {
        for (int m : {5, 7}) {
            Field F = Field::with_default_poly(m);
            for (gf a = 1; a < F.size(); ++a) {
                auto ns = null_space(form_matrix(F, 1, a));
                REQUIRE(ns.size() == 2);
                gf x = ns[0] ? ns[0] : ns[1];
                REQUIRE(x != 0);
                REQUIRE(F.mul(F.pow(x, 3), a) == 1);  // x^3 = 1/a
                // membership check: x P = 0
                BinSymMatrix P = form_matrix(F, 1, a);
                for (gf y = 0; y < F.size(); ++y) REQUIRE(bilinear_gf2(P, x, y) == 0);
            }
        }
    }
}

TEST_CASE("Z4 quadratic form worked values") {
    Field F = Field::with_default_poly(3);
    BinSymMatrix P = form_matrix(F, 0, 0b001);  // P^0(100)
    REQUIRE(quad_form_z4(P, 0b110) == 2);       // x = (0,1,1): off-diagonal pair counted twice
    REQUIRE(quad_form_z4(P, 0b001) == 1);       // x = (1,0,0): diagonal entry once
    REQUIRE(quad_form_z4(P, 0) == 0);
}
