// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "support.hpp"

using namespace symprune;
using testing_support::rel;

namespace {

const Matrix W{{1, -2}, {3, 4}};

std::vector<double> vec(std::initializer_list<double> v) { return v; }

} // namespace

TEST(Matrix, RejectsNonFiniteAndRaggedInput) {
    EXPECT_THROW(Matrix(1, 2, std::vector<double>{1.0, std::nan("")}), config_error);
    EXPECT_THROW(Matrix(1, 1, std::numeric_limits<double>::infinity()), config_error);
    EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), shape_error);
    EXPECT_THROW((Matrix{{1, 2}, {3}}), shape_error);
}

TEST(Matrix, RowPnormExamples) {
    EXPECT_EQ(row_pnorm(W, norm_order::l1), vec({3, 7}));
    EXPECT_EQ(row_pnorm(Matrix(2, 2), norm_order::l2), vec({0, 0}));
    EXPECT_EQ(row_pnorm(W, norm_order::inf), vec({2, 4}));
}

TEST(Matrix, ColPnormExamples) {
    EXPECT_EQ(col_pnorm(Matrix{{1, 0}, {0, 2}}, norm_order::l2), vec({1, 2}));
    EXPECT_EQ(col_pnorm(Matrix::identity(3), norm_order::l2), vec({1, 1, 1}));
    EXPECT_EQ(col_pnorm(W, norm_order::l1), vec({4, 6}));
}

TEST(Matrix, FrobeniusExamples) {
    EXPECT_EQ(frobenius(Matrix{{3, 4}, {0, 0}}), 5.0);
    EXPECT_EQ(frobenius(Matrix(4, 4)), 0.0);
    EXPECT_DOUBLE_EQ(frobenius(Matrix::identity(2)), std::sqrt(2.0));
}

TEST(Matrix, MatmulExamples) {
    const Matrix m{{1, 2}, {3, 4}};
    EXPECT_EQ(matmul(Matrix::identity(2), m), m);
    EXPECT_EQ(matmul(Matrix{{1, 0}, {0, 2}}, W), (Matrix{{1, -2}, {6, 8}}));
    EXPECT_EQ(matmul(Matrix(2, 2), Matrix(2, 5, 3.0)), Matrix(2, 5));
    EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), shape_error);
}

TEST(Matrix, ParsesNormOrders) {
    EXPECT_EQ(parse_norm_order("0"), norm_order::l0);
    EXPECT_EQ(parse_norm_order("1"), norm_order::l1);
    EXPECT_EQ(parse_norm_order("inf"), norm_order::inf);
    EXPECT_EQ(norm_order_from(4.0), norm_order::l4);
    EXPECT_THROW(parse_norm_order("5"), config_error);
    EXPECT_THROW(norm_order_from(1.5), config_error);
}

TEST(Matrix, NormsMatchNaiveOracle) {
    std::mt19937_64 eng(11);
    const double ps[] = {0, 1, 2, 3, 4, -1};
    const norm_order orders[] = {norm_order::l0, norm_order::l1, norm_order::l2,
                                 norm_order::l3, norm_order::l4, norm_order::inf};
    for (int t = 0; t < 50; ++t) {
        Matrix m = testing_support::random_matrix(eng, 1 + t % 7, 1 + t % 5, -3, 3);
        m(0, 0) = 0.0;
        const auto g = testing_support::to_grid(m);
        for (int i = 0; i < 6; ++i) {
            const auto got_r = row_pnorm(m, orders[i]);
            const auto ref_r = oracle::row_norms(g, ps[i]);
            const auto got_c = col_pnorm(m, orders[i]);
            const auto ref_c = oracle::col_norms(g, ps[i]);
            for (std::size_t j = 0; j < got_r.size(); ++j) EXPECT_NEAR(got_r[j], ref_r[j], 1e-12 * (1 + ref_r[j]));
            for (std::size_t j = 0; j < got_c.size(); ++j) EXPECT_NEAR(got_c[j], ref_c[j], 1e-12 * (1 + ref_c[j]));
        }
    }
}

TEST(Matrix, TransposeSwapsRowAndColumnNorms) {
    std::mt19937_64 eng(3);
    for (int t = 0; t < 30; ++t) {
        const Matrix m = testing_support::random_matrix(eng, 2 + t % 6, 1 + t % 9);
        for (auto p : {norm_order::l1, norm_order::l2, norm_order::inf}) {
            const auto a = row_pnorm(transpose(m), p);
            const auto b = col_pnorm(m, p);
            ASSERT_EQ(a.size(), b.size());
            for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(rel(a[i], b[i]), 1e-12);
        }
    }
}

TEST(Matrix, TriangleInequalityAndScaleEquivariance) {
    std::mt19937_64 eng(5);
    for (int t = 0; t < 30; ++t) {
        const Matrix a = testing_support::random_matrix(eng, 4, 6);
        const Matrix b = testing_support::random_matrix(eng, 4, 6);
        EXPECT_LE(frobenius(a + b), frobenius(a) + frobenius(b) + 1e-12);
        const double c = -2.5 + 0.1 * t;
        for (auto p : {norm_order::l1, norm_order::l2, norm_order::l3, norm_order::l4, norm_order::inf}) {
            const auto scaled = row_pnorm(c * a, p);
            const auto base = row_pnorm(a, p);
            for (std::size_t i = 0; i < base.size(); ++i) EXPECT_LE(rel(scaled[i], std::fabs(c) * base[i]), 1e-12);
        }
    }
}

TEST(Matrix, ZeroNormCountsAndIsScaleInvariant) {
    const Matrix m{{0, 1.5, -2}, {0, 0, 0}};
    EXPECT_EQ(row_pnorm(m, norm_order::l0), vec({2, 0}));
    EXPECT_EQ(row_pnorm(-7.0 * m, norm_order::l0), vec({2, 0}));
    EXPECT_EQ(pnorm(std::vector<double>{0, 0}, norm_order::l0), 0.0);
}

TEST(Matrix, SafeReciprocal) {
    EXPECT_EQ(safe_reciprocal(0.0), 0.0);
    EXPECT_EQ(safe_reciprocal(4.0), 0.25);
}
