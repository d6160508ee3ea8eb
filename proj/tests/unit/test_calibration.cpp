// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstring>

#include "support.hpp"

using namespace symprune;
using testing_support::rel;

namespace {

Matrix rows_of(const Matrix& x, std::size_t begin, std::size_t end) {
    Matrix out(end - begin, x.cols());
    for (std::size_t t = begin; t < end; ++t)
        for (std::size_t j = 0; j < x.cols(); ++j) out(t - begin, j) = x(t, j);
    return out;
}

void expect_close(const ActivationStats& a, const ActivationStats& b, double tol) {
    ASSERT_EQ(a.feature_count, b.feature_count);
    EXPECT_EQ(a.token_count, b.token_count);
    for (std::size_t j = 0; j < a.feature_count; ++j) {
        EXPECT_NEAR(a.col_l2[j], b.col_l2[j], tol * (1 + std::fabs(b.col_l2[j])));
        EXPECT_NEAR(a.mean[j], b.mean[j], tol * (1 + std::fabs(b.mean[j])));
        EXPECT_NEAR(a.variance[j], b.variance[j], tol * (1 + std::fabs(b.variance[j])));
    }
}

} // namespace

TEST(Calibration, ComputeStatsExamples) {
    const auto s = compute_stats(Matrix{{1, 0}, {0, 2}});
    EXPECT_EQ(s.col_l2, (std::vector<double>{1, 2}));
    EXPECT_EQ(s.mean, (std::vector<double>{0.5, 1.0}));
    EXPECT_EQ(s.variance, (std::vector<double>{0.25, 1.0}));
    EXPECT_EQ(s.token_count, 2u);

    const auto single = compute_stats(Matrix{{3, -4}});
    EXPECT_EQ(single.col_l2, (std::vector<double>{3, 4}));
    EXPECT_EQ(single.mean, (std::vector<double>{3, -4}));
    EXPECT_EQ(single.variance, (std::vector<double>{0, 0}));

    const auto zero = compute_stats(Matrix(5, 3));
    EXPECT_EQ(zero.token_count, 5u);
    EXPECT_EQ(zero.col_l2, std::vector<double>(3));
    EXPECT_EQ(zero.variance, std::vector<double>(3));

    const auto none = compute_stats(Matrix(0, 3));
    EXPECT_EQ(none, ActivationStats::empty(3));
}

TEST(Calibration, MatchesNaiveMoments) {
    std::mt19937_64 eng(2);
    const Matrix x = testing_support::random_matrix(eng, 40, 6, -2, 3);
    const auto s = compute_stats(x);
    const auto m = oracle::moments(testing_support::to_grid(x));
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_LE(rel(s.col_l2[j], m.l2[j]), 1e-12);
        EXPECT_LE(rel(s.mean[j], m.mean[j]), 1e-12);
        EXPECT_LE(rel(s.variance[j], m.var[j]), 1e-12);
        EXPECT_GE(s.col_l2[j] * s.col_l2[j], 40 * s.mean[j] * s.mean[j] - 1e-9);
    }
}

TEST(Calibration, MergeExamples) {
    std::mt19937_64 eng(4);
    const Matrix x = testing_support::random_matrix(eng, 31, 5, -1, 2);
    const auto whole = compute_stats(x);
    EXPECT_EQ(merge_stats(whole, ActivationStats::empty(5)), whole);
    EXPECT_EQ(merge_stats(ActivationStats::empty(5), whole), whole);
    expect_close(merge_stats(compute_stats(rows_of(x, 0, 15)), compute_stats(rows_of(x, 15, 31))), whole, 1e-10);

    const auto m = merge_stats(compute_stats(Matrix{{1}}), compute_stats(Matrix{{3}}));
    EXPECT_DOUBLE_EQ(m.mean[0], 2.0);
    EXPECT_DOUBLE_EQ(m.variance[0], 1.0);
    EXPECT_DOUBLE_EQ(m.col_l2[0], std::sqrt(10.0));
    EXPECT_EQ(m.token_count, 2u);

    EXPECT_THROW(merge_stats(ActivationStats::empty(2), ActivationStats::empty(3)), shape_error);
}

TEST(Calibration, MergeIsAssociativeAndCommutative) {
    std::mt19937_64 eng(8);
    for (int t = 0; t < 20; ++t) {
        const auto a = compute_stats(testing_support::random_matrix(eng, 3 + t, 4, -1, 1));
        const auto b = compute_stats(testing_support::random_matrix(eng, 7, 4, 0, 5));
        const auto c = compute_stats(testing_support::random_matrix(eng, 2 + 2 * t, 4, -3, 0));
        expect_close(merge_stats(a, b), merge_stats(b, a), 1e-9);
        expect_close(merge_stats(merge_stats(a, b), c), merge_stats(a, merge_stats(b, c)), 1e-9);
    }
}

TEST(Calibration, ScalingTokens) {
    std::mt19937_64 eng(9);
    const Matrix x = testing_support::random_matrix(eng, 12, 3);
    const double c = -2.5;
    const auto s = compute_stats(x);
    const auto sc = compute_stats(c * x);
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_LE(rel(sc.col_l2[j], std::fabs(c) * s.col_l2[j]), 1e-12);
        EXPECT_LE(rel(sc.mean[j], c * s.mean[j]), 1e-12);
        EXPECT_LE(rel(sc.variance[j], c * c * s.variance[j]), 1e-12);
    }
}

TEST(Calibration, SymaRoundTripAndErrors) {
    std::mt19937_64 eng(10);
    const auto s = compute_stats(testing_support::random_matrix(eng, 9, 4));
    const auto back = load_stats(store_stats(s));
    EXPECT_EQ(back.token_count, 9u);
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_EQ(back.col_l2[j], static_cast<double>(static_cast<float>(s.col_l2[j])));
        EXPECT_EQ(back.mean[j], static_cast<double>(static_cast<float>(s.mean[j])));
        EXPECT_EQ(back.variance[j], static_cast<double>(static_cast<float>(s.variance[j])));
    }

    bytes b = store_stats(s);
    EXPECT_EQ(b.size(), 6u + 4 + 8 + 3 * 4 * 4);
    b[0] = 'X';
    EXPECT_THROW(load_stats(b), format_error);
    bytes truncated = store_stats(s);
    truncated.pop_back();
    EXPECT_THROW(load_stats(truncated), format_error);
    bytes negative_var = store_stats(s);
    const float neg = -1.0f;
    std::memcpy(negative_var.data() + 18 + 2 * 16, &neg, 4);
    EXPECT_THROW(load_stats(negative_var), format_error);

    const auto empty = load_stats(store_stats(ActivationStats::empty(0)));
    EXPECT_EQ(empty.feature_count, 0u);
    EXPECT_EQ(empty.token_count, 0u);
}
