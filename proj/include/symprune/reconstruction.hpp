// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "symprune/errors.hpp"
#include "symprune/matrix.hpp"

namespace symprune {

enum class objective_kind { inprecon, sym, sym_squared };

inline std::string to_string(objective_kind k) {
    switch (k) {
    case objective_kind::inprecon: return "inprecon";
    case objective_kind::sym: return "sym";
    case objective_kind::sym_squared: return "sym_squared";
    }
    return "?";
}

inline objective_kind parse_objective(std::string_view s) {
    if (s == "inprecon") return objective_kind::inprecon;
    if (s == "sym") return objective_kind::sym;
    if (s == "sym_squared") return objective_kind::sym_squared;
    throw config_error("unknown objective '" + std::string(s) + "'");
}

/// value == input_term + output_term for every objective.
struct ObjectiveReport {
    objective_kind kind = objective_kind::sym;
    double value = 0.0;
    double input_term = 0.0;
    double output_term = 0.0;
};

namespace detail {

inline void check_pair(const Matrix& w, const Matrix& pruned) {
    if (!w.same_shape(pruned)) throw shape_error("objective: W and pruned W differ in shape");
}

// ||X delta||_F and ||delta Y||_F for delta = pruned - W.
inline std::pair<double, double> sym_terms(const Matrix& x, const Matrix& y, const Matrix& w, const Matrix& pruned) {
    check_pair(w, pruned);
    if (x.cols() != w.rows())
        throw shape_error("objective: X has " + std::to_string(x.cols()) + " columns, W has " +
                          std::to_string(w.rows()) + " rows");
    if (y.rows() != w.cols())
        throw shape_error("objective: Y has " + std::to_string(y.rows()) + " rows, W has " +
                          std::to_string(w.cols()) + " columns");
    const Matrix delta = pruned - w;
    return {frobenius(matmul(x, delta)), frobenius(matmul(delta, y))};
}

} // namespace detail

/// ||X (pruned - W)||_F^2
inline double inprecon(const Matrix& x, const Matrix& w, const Matrix& pruned) {
    detail::check_pair(w, pruned);
    if (x.cols() != w.rows()) throw shape_error("inprecon: X columns must equal W rows");
    const double f = frobenius(matmul(x, pruned - w));
    return f * f;
}

/// g = ||X delta||_F + ||delta Y||_F (non-squared norms).
inline ObjectiveReport sym_objective(const Matrix& x, const Matrix& y, const Matrix& w, const Matrix& pruned) {
    const auto [in, out] = detail::sym_terms(x, y, w, pruned);
    return {objective_kind::sym, in + out, in, out};
}

/// g' = ||X delta||_F^2 + ||delta Y||_F^2.
inline ObjectiveReport sym_objective_squared(const Matrix& x, const Matrix& y, const Matrix& w,
                                             const Matrix& pruned) {
    const auto [in, out] = detail::sym_terms(x, y, w, pruned);
    return {objective_kind::sym_squared, in * in + out * out, in * in, out * out};
}

inline ObjectiveReport evaluate_objective(objective_kind kind, const Matrix& x, const Matrix& y, const Matrix& w,
                                          const Matrix& pruned) {
    switch (kind) {
    case objective_kind::inprecon: {
        const double v = inprecon(x, w, pruned);
        return {objective_kind::inprecon, v, v, 0.0};
    }
    case objective_kind::sym: return sym_objective(x, y, w, pruned);
    case objective_kind::sym_squared: return sym_objective_squared(x, y, w, pruned);
    }
    throw config_error("unhandled objective");
}

} // namespace symprune
