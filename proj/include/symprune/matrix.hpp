// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symprune/errors.hpp"

namespace symprune {

/// Dense row-major matrix of doubles. All arithmetic in the library runs in
/// 64-bit floating point; files store f32.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {
        check_finite();
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_)
            throw shape_error("matrix: expected " + std::to_string(rows_ * cols_) +
                              " values, got " + std::to_string(values_.size()));
        check_finite();
    }

    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        values_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw shape_error("matrix: ragged initializer");
            values_.insert(values_.end(), r.begin(), r.end());
        }
        check_finite();
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<const double> d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool same_shape(const Matrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    void check_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) throw config_error("matrix: non-finite entry");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Layer weights W (rows = input features, cols = output features).
using WeightMatrix = Matrix;
/// Calibration or auxiliary matrices (X, Y, A, B, C).
using DenseMatrix = Matrix;

enum class norm_order { l0, l1, l2, l3, l4, inf };

inline norm_order norm_order_from(double p) {
    if (std::isinf(p) && p > 0) return norm_order::inf;
    if (p == 0.0) return norm_order::l0;
    if (p == 1.0) return norm_order::l1;
    if (p == 2.0) return norm_order::l2;
    if (p == 3.0) return norm_order::l3;
    if (p == 4.0) return norm_order::l4;
    throw config_error("unsupported norm order p=" + std::to_string(p));
}

inline norm_order parse_norm_order(std::string_view s) {
    if (s == "inf" || s == "Inf" || s == "INF" || s == "infinity") return norm_order::inf;
    if (s == "0") return norm_order::l0;
    if (s == "1") return norm_order::l1;
    if (s == "2") return norm_order::l2;
    if (s == "3") return norm_order::l3;
    if (s == "4") return norm_order::l4;
    throw config_error("unsupported norm order '" + std::string(s) + "'");
}

inline std::string to_string(norm_order p) {
    switch (p) {
    case norm_order::l0: return "0";
    case norm_order::l1: return "1";
    case norm_order::l2: return "2";
    case norm_order::l3: return "3";
    case norm_order::l4: return "4";
    case norm_order::inf: return "inf";
    }
    return "?";
}

/// p-norm of the sequence at(0..n-1), reduced left to right in long double.
/// p=0 counts nonzeros; p=inf is the max absolute value.
template <typename At>
double pnorm(std::size_t n, At&& at, norm_order p) {
    switch (p) {
    case norm_order::l0: {
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (at(i) != 0.0) ++count;
        return static_cast<double>(count);
    }
    case norm_order::l1: {
        long double acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc += std::fabs(static_cast<long double>(at(i)));
        return static_cast<double>(acc);
    }
    case norm_order::l2: {
        long double acc = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const long double v = at(i);
            acc += v * v;
        }
        return static_cast<double>(std::sqrt(acc));
    }
    case norm_order::l3:
    case norm_order::l4: {
        const long double e = p == norm_order::l3 ? 3.0L : 4.0L;
        long double acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc += std::pow(std::fabs(static_cast<long double>(at(i))), e);
        return static_cast<double>(std::pow(acc, 1.0L / e));
    }
    case norm_order::inf: {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(at(i)));
        return m;
    }
    }
    return 0.0;
}

inline double pnorm(std::span<const double> v, norm_order p) {
    return pnorm(v.size(), [&](std::size_t i) { return v[i]; }, p);
}

inline std::vector<double> row_pnorm(const Matrix& m, norm_order p) {
    std::vector<double> out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) out[r] = pnorm(m.row(r), p);
    return out;
}

inline std::vector<double> col_pnorm(const Matrix& m, norm_order p) {
    std::vector<double> out(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c)
        out[c] = pnorm(m.rows(), [&](std::size_t r) { return m(r, c); }, p);
    return out;
}

inline double frobenius(const Matrix& m) { return pnorm(m.values(), norm_order::l2); }

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw shape_error("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                          " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < a.cols(); ++l) acc += a(i, l) * b(l, j);
            out(i, j) = acc;
        }
    return out;
}

inline Matrix transpose(const Matrix& m) {
    Matrix out(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
    return out;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw shape_error("matrix subtraction: shape mismatch");
    Matrix out = a;
    auto o = out.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bv[i];
    return out;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw shape_error("matrix addition: shape mismatch");
    Matrix out = a;
    auto o = out.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += bv[i];
    return out;
}

inline Matrix operator*(double s, const Matrix& m) {
    Matrix out = m;
    for (double& v : out.values()) v *= s;
    return out;
}

/// Reciprocal with the convention 1/0 := 0 (norm of an all-zero row, column or sample).
inline double safe_reciprocal(double x) noexcept { return x > 0.0 ? 1.0 / x : 0.0; }

} // namespace symprune
