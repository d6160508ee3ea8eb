// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "support.hpp"

using namespace symprune;
using testing_support::rel;

namespace {

const Matrix W{{1, -2}, {3, 4}};
const Matrix X{{1, 0}, {0, 2}};
const Matrix Y{{3, 0}, {0, 5}};

Matrix alpha_grid(const Matrix& x, const Matrix& y) {
    const auto xn = col_pnorm(x, norm_order::l2);
    const auto yn = row_pnorm(y, norm_order::l2);
    Matrix out(xn.size(), yn.size());
    for (std::size_t j = 0; j < xn.size(); ++j)
        for (std::size_t k = 0; k < yn.size(); ++k) out(j, k) = xn[j] + yn[k];
    return out;
}

} // namespace

TEST(Verification, ScaledDeviation) {
    EXPECT_EQ(scaled_deviation(1.0, 1.0), 0.0);
    EXPECT_NEAR(scaled_deviation(1.0 + 1e-10, 1.0), 1e-10, 1e-16);
    // near zero the 1e-12 absolute tolerance maps onto the 1e-9 threshold
    EXPECT_LE(scaled_deviation(5e-13, 0.0), 1e-9);
    EXPECT_GT(scaled_deviation(5e-12, 0.0), 1e-9);
}

TEST(Verification, SinglePruneIdentity) {
    EXPECT_EQ(sym_objective(X, Y, W, prune_single(W, 0, 0)).value, 4.0);
    Matrix wz = W;
    wz(1, 0) = 0;
    EXPECT_EQ(sym_objective(X, Y, wz, prune_single(wz, 1, 0)).value, 0.0);
    const auto o = verify_lemma1(1000, 8, 0);
    EXPECT_TRUE(o.passed);
    EXPECT_EQ(o.trials, 1000u);
    EXPECT_LE(o.max_deviation, 1e-9);
}

TEST(Verification, ReciprocalL1Constructions) {
    for (auto v : {thm2_variant::v1_constant, thm2_variant::v2_diagonal}) {
        const auto [x, y] = construct_thm2(W, v);
        EXPECT_NEAR(alpha_grid(x, y)(0, 0), 7.0 / 12, 1e-15);
        const auto [xi, yi] = construct_thm2(Matrix::identity(4), v);
        const Matrix gi = alpha_grid(xi, yi);
        for (double a : gi.values()) EXPECT_NEAR(a, 2.0, 1e-15);
    }
    std::mt19937_64 eng(3);
    const Matrix r = testing_support::random_matrix(eng, 5, 3);
    const auto [x1, y1] = construct_thm2(r, thm2_variant::v1_constant);
    const auto [x2, y2] = construct_thm2(r, thm2_variant::v2_diagonal);
    EXPECT_NE(x1, x2);
    const auto g1 = alpha_grid(x1, y1), g2 = alpha_grid(x2, y2);
    for (std::size_t i = 0; i < g1.size(); ++i) EXPECT_LE(rel(g1.values()[i], g2.values()[i]), 1e-12);
    EXPECT_THROW(construct_thm2(Matrix{{0, 0}, {1, 2}}, thm2_variant::v1_constant), config_error);
    EXPECT_TRUE(verify_thm2(500, 8, 0).passed);
}

TEST(Verification, RiaConstruction) {
    const Matrix c{{0, 1}, {2, 1}}; // ||C_:0||_2 = 2
    const auto [a, b] = construct_ria(W, c, 1.0, 0, 0, 1, 1);
    const double got = row_pnorm(a, norm_order::l2)[0] + col_pnorm(b, norm_order::l2)[0];
    EXPECT_NEAR(got, 7.0 / 6, 1e-15);
    const auto [a0, b0] = construct_ria(W, c, 0.0, 0, 0, 0, 0);
    EXPECT_NEAR(row_pnorm(a0, norm_order::l2)[0] + col_pnorm(b0, norm_order::l2)[0], 7.0 / 12, 1e-15);
    EXPECT_TRUE(verify_ria(100, 5, 0).passed);
}

TEST(Verification, GeneralDiagConstruction) {
    const auto id = construct_general_diag(Matrix::identity(2), Matrix::identity(2), W);
    const auto [x, y] = construct_thm2(W, thm2_variant::v2_diagonal);
    const auto ref = alpha_grid(x, y);
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_LE(rel(id.lhs.values()[i], ref.values()[i]), 1e-12);

    std::mt19937_64 eng(4);
    const Matrix a = testing_support::random_matrix(eng, 4, 4), b = testing_support::random_matrix(eng, 4, 4);
    const Matrix w = testing_support::random_matrix(eng, 4, 4);
    EXPECT_LE(construct_general_diag(a, b, w).max_deviation, 1e-9);
    const auto base = construct_general_diag(a, Matrix(4, 4), w);
    const auto scaled = construct_general_diag(3.0 * a, Matrix(4, 4), w);
    for (std::size_t i = 0; i < base.lhs.size(); ++i)
        EXPECT_LE(rel(scaled.lhs.values()[i], 3 * base.lhs.values()[i]), 1e-12);
    EXPECT_TRUE(verify_general_diag(100, 8, 0).passed);
}

TEST(Verification, LpConstructions) {
    const Matrix w{{3, 4}};
    const auto [x, y] = construct_lp(w, norm_order::l2, lp_mode::weight_proportional);
    EXPECT_NEAR(x(0, 0), 0.12, 1e-15);
    EXPECT_NEAR(x(1, 0), 0.16, 1e-15);
    EXPECT_NEAR(col_pnorm(x, norm_order::l2)[0], 0.2, 1e-15);

    const std::vector<double> e0{1, 0, 0}, v{0, 1};
    const auto [xu, yu] = construct_lp(W, norm_order::l1, lp_mode::unit_vector, e0, v);
    EXPECT_EQ(xu(0, 0), 1.0 / 3);
    EXPECT_EQ(xu(1, 0), 0.0);
    EXPECT_EQ(xu(0, 1), 1.0 / 7);
    const std::vector<double> not_unit{1, 1};
    EXPECT_THROW(construct_lp(W, norm_order::l1, lp_mode::unit_vector, not_unit, v), config_error);
    EXPECT_TRUE(verify_lp(lp_mode::weight_proportional, 100, 8, 0).passed);
    EXPECT_TRUE(verify_lp(lp_mode::unit_vector, 100, 8, 0).passed);
}

TEST(Verification, StochriaConstruction) {
    const Matrix w{{1, -2}, {3, 4}};
    const std::vector<std::size_t> rs{1}, cs{0};
    const auto [x, y] = construct_stochria(w, 0, rs, 0, cs, 1);
    EXPECT_EQ(x, (std::vector<double>{0, 0.5}));
    EXPECT_EQ(pnorm(x, norm_order::l2), 0.5);

    const std::vector<std::size_t> full{0, 1};
    const auto [xf, yf] = construct_stochria(w, 0, full, 0, full, 2);
    const auto [x1, y1] = construct_thm2(w, thm2_variant::v1_constant);
    EXPECT_NEAR(pnorm(xf, norm_order::l2) + pnorm(yf, norm_order::l2), alpha_grid(x1, y1)(0, 0), 1e-15);
    EXPECT_THROW(construct_stochria(w, 0, rs, 0, full, 1), config_error);
    EXPECT_TRUE(verify_stochria_construction(100, 8, 0).passed);
}

TEST(Verification, GIdentity) {
    EXPECT_TRUE(verify_g_identity(Matrix(3, 2)).passed);
    const auto o = verify_g_identity(W);
    EXPECT_TRUE(o.passed);
    EXPECT_LE(o.max_deviation, 1e-15);
    EXPECT_TRUE(verify_g_identity_random(100, 7, 0).passed);
}

TEST(Verification, BruteForcePrune) {
    const auto k0 = brute_force_prune(X, Y, W, 0);
    EXPECT_EQ(k0.mask, SparsityMask(2, 2, true, k0.mask.pattern()));
    EXPECT_EQ(k0.g, 0.0);

    const auto k1 = brute_force_prune(X, Y, W, 1);
    EXPECT_EQ(k1.pruned, (std::vector<std::size_t>{0}));
    EXPECT_DOUBLE_EQ(k1.g, 4.0);

    const auto all = brute_force_prune(X, Y, W, 4);
    EXPECT_DOUBLE_EQ(all.g, frobenius(matmul(X, W)) + frobenius(matmul(W, Y)));
    EXPECT_EQ(all.mask.count_kept(), 0u);

    // Equal objectives resolve to the lexicographically smallest set.
    const auto tie = brute_force_prune(Matrix::identity(2), Matrix::identity(2), Matrix(2, 2, 1.0), 2);
    EXPECT_EQ(tie.pruned, (std::vector<std::size_t>{0, 1}));

    EXPECT_THROW(brute_force_prune(Matrix(1, 3), Matrix(7, 1), Matrix(3, 7), 1), config_error);
    EXPECT_THROW(brute_force_prune(X, Y, W, 5), config_error);
}

TEST(Verification, BruteForceMatchesNaiveEnumeration) {
    std::mt19937_64 eng(6);
    for (int t = 0; t < 20; ++t) {
        const auto inst = random_oracle_instance(eng);
        const std::size_t n = inst.w.size();
        const std::size_t k = 1 + t % 3;
        const auto bf = brute_force_prune(inst.x, inst.y, inst.w, k);
        double best = 1e300;
        const auto xg = testing_support::to_grid(inst.x), yg = testing_support::to_grid(inst.y),
                   wg = testing_support::to_grid(inst.w);
        for (std::uint32_t bitsel = 0; bitsel < (1u << n); ++bitsel) {
            if (static_cast<std::size_t>(__builtin_popcount(bitsel)) != k) continue;
            auto pg = wg;
            for (std::size_t i = 0; i < n; ++i)
                if (bitsel >> i & 1u) pg[i / inst.w.cols()][i % inst.w.cols()] = 0;
            best = std::min(best, oracle::sym(xg, yg, wg, pg));
        }
        EXPECT_LE(rel(bf.g, best), 1e-12);
    }
}

TEST(Verification, OracleAgreementAndDegeneracy) {
    EXPECT_TRUE(verify_oracle_agreement(200, 0).passed);
    EXPECT_TRUE(verify_stochria_full_support(50, 12, 0).passed);
    const auto gap = greedy_gap(30, 0);
    EXPECT_EQ(gap.instances, 30u);
    EXPECT_GE(gap.max_relative_gap, 0.0);
}

TEST(Verification, HeuristicBeatsRandomMasks) {
    const auto rep = heuristic_vs_random(10, 0);
    EXPECT_EQ(rep.instances, 10u);
    EXPECT_GE(rep.wins, 9u);
    const auto mask_eng = keyed_engine(1, 2, 3);
    auto e = mask_eng;
    const auto m = random_mask(8, 8, 0.5, e);
    EXPECT_EQ(m.count_kept(), 32u);
}

TEST(Verification, SuitesPass) {
    for (const auto& o : run_lemma_suite(50, 7)) EXPECT_TRUE(o.passed) << o.name;
    for (const auto& o : run_oracle_suite(50, 7)) EXPECT_TRUE(o.passed) << o.name;
}
