// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "support.hpp"

using namespace symprune;
using testing_support::rel;

namespace {

const Matrix X{{1, 0}, {0, 2}};
const Matrix Y{{3, 0}, {0, 5}};
const Matrix W{{1, -2}, {3, 4}};
const Matrix W00{{0, -2}, {3, 4}};

} // namespace

TEST(Reconstruction, Inprecon) {
    EXPECT_EQ(inprecon(X, W, W), 0.0);
    EXPECT_DOUBLE_EQ(inprecon(X, W, W00), 1.0);
    const double f = frobenius(W00 - W);
    EXPECT_DOUBLE_EQ(inprecon(Matrix::identity(2), W, W00), f * f);
    EXPECT_THROW(inprecon(Matrix(2, 3), W, W00), shape_error);
    EXPECT_THROW(inprecon(X, W, Matrix(2, 3)), shape_error);
}

TEST(Reconstruction, SymObjective) {
    const auto g = sym_objective(X, Y, W, W00);
    EXPECT_DOUBLE_EQ(g.value, 4.0);
    EXPECT_DOUBLE_EQ(g.input_term, 1.0);
    EXPECT_DOUBLE_EQ(g.output_term, 3.0);
    EXPECT_EQ(g.value, score_general_sym(W, std::vector<double>{1, 2}, std::vector<double>{3, 5})(0, 0));
    EXPECT_EQ(sym_objective(X, Y, W, W).value, 0.0);
    const auto no_y = sym_objective(X, Matrix(2, 3), W, W00);
    EXPECT_DOUBLE_EQ(no_y.value, std::sqrt(inprecon(X, W, W00)));
    EXPECT_THROW(sym_objective(X, Matrix(3, 2), W, W00), shape_error);
}

TEST(Reconstruction, SymObjectiveSquared) {
    const auto g = sym_objective_squared(X, Y, W, W00);
    EXPECT_DOUBLE_EQ(g.value, 10.0);
    EXPECT_DOUBLE_EQ(g.value, g.input_term + g.output_term);
    EXPECT_EQ(sym_objective_squared(X, Y, W, W).value, 0.0);
    const double f = frobenius(W00 - W);
    EXPECT_DOUBLE_EQ(sym_objective_squared(Matrix::identity(2), Matrix::identity(2), W, W00).value, 2 * f * f);
}

TEST(Reconstruction, SingleWeightIdentitiesOnRandomInputs) {
    std::mt19937_64 eng(31);
    for (int t = 0; t < 200; ++t) {
        const std::size_t a = 1 + t % 5, b = 1 + (t / 5) % 6, c = 1 + (t / 3) % 7, d = 1 + t % 4;
        const Matrix x = testing_support::random_matrix(eng, a, b);
        const Matrix y = testing_support::random_matrix(eng, c, d);
        const Matrix w = testing_support::random_matrix(eng, b, c);
        const std::size_t j = t % b, k = (t / 2) % c;
        Matrix pruned = w;
        pruned(j, k) = 0;
        const double xn = oracle::norm(oracle::column(testing_support::to_grid(x), j), 2);
        const double yn = oracle::norm(testing_support::to_grid(y)[k], 2);
        EXPECT_LE(rel(sym_objective(x, y, w, pruned).value, std::fabs(w(j, k)) * (xn + yn)), 1e-9);
        EXPECT_LE(rel(sym_objective_squared(x, y, w, pruned).value, w(j, k) * w(j, k) * (xn * xn + yn * yn)), 1e-9);
        const double naive = oracle::sym(testing_support::to_grid(x), testing_support::to_grid(y),
                                         testing_support::to_grid(w), testing_support::to_grid(pruned));
        EXPECT_LE(rel(sym_objective(x, y, w, pruned).value, naive), 1e-12);
    }
}

TEST(Reconstruction, EvaluateDispatch) {
    EXPECT_EQ(evaluate_objective(objective_kind::inprecon, X, Y, W, W00).value, 1.0);
    EXPECT_EQ(evaluate_objective(objective_kind::sym, X, Y, W, W00).value, 4.0);
    EXPECT_EQ(evaluate_objective(objective_kind::sym_squared, X, Y, W, W00).value, 10.0);
    EXPECT_EQ(parse_objective("sym_squared"), objective_kind::sym_squared);
    EXPECT_THROW(parse_objective("l2"), config_error);
}
