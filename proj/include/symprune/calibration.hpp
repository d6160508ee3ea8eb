// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "symprune/errors.hpp"
#include "symprune/io.hpp"
#include "symprune/matrix.hpp"

namespace symprune {

/// Per-input-feature aggregates of calibration activations. This is the only
/// form in which the activations X reach the scoring and fine-tuning code.
struct ActivationStats {
    std::size_t feature_count = 0;
    std::uint64_t token_count = 0;
    std::vector<double> col_l2;   // ||X_{:j}||_2 over all tokens
    std::vector<double> mean;     // E[X_j]
    std::vector<double> variance; // population variance Var(X_j)

    static ActivationStats empty(std::size_t features) {
        return {features, 0, std::vector<double>(features), std::vector<double>(features),
                std::vector<double>(features)};
    }

    friend bool operator==(const ActivationStats&, const ActivationStats&) = default;
};

/// Throws config_error when the structural invariants do not hold.
inline void validate(const ActivationStats& s) {
    const auto n = s.feature_count;
    if (s.col_l2.size() != n || s.mean.size() != n || s.variance.size() != n)
        throw config_error("activation stats: vector lengths differ from feature_count");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(s.col_l2[j] >= 0.0) || !(s.variance[j] >= 0.0) || !std::isfinite(s.mean[j]) ||
            !std::isfinite(s.col_l2[j]) || !std::isfinite(s.variance[j]))
            throw config_error("activation stats: invalid entry at feature " + std::to_string(j));
        if (s.token_count == 0 && (s.col_l2[j] != 0.0 || s.mean[j] != 0.0 || s.variance[j] != 0.0))
            throw config_error("activation stats: zero tokens but nonzero statistics");
    }
}

/// X holds one token per row and one feature per column.
inline ActivationStats compute_stats(const Matrix& x) {
    const std::size_t n = x.cols();
    ActivationStats s = ActivationStats::empty(n);
    s.token_count = x.rows();
    if (x.rows() == 0) return s;

    const long double tokens = static_cast<long double>(x.rows());
    for (std::size_t j = 0; j < n; ++j) {
        long double sum = 0, sq = 0;
        for (std::size_t t = 0; t < x.rows(); ++t) {
            const long double v = x(t, j);
            sum += v;
            sq += v * v;
        }
        const long double mean = sum / tokens;
        long double centered = 0;
        for (std::size_t t = 0; t < x.rows(); ++t) {
            const long double d = x(t, j) - mean;
            centered += d * d;
        }
        s.col_l2[j] = static_cast<double>(std::sqrt(sq));
        s.mean[j] = static_cast<double>(mean);
        s.variance[j] = static_cast<double>(centered / tokens);
    }
    return s;
}

/// Pooled statistics of the union of both token sets.
inline ActivationStats merge_stats(const ActivationStats& a, const ActivationStats& b) {
    if (a.feature_count != b.feature_count)
        throw shape_error("merge_stats: feature_count " + std::to_string(a.feature_count) + " vs " +
                          std::to_string(b.feature_count));
    if (b.token_count == 0) return a;
    if (a.token_count == 0) return b;

    ActivationStats out = ActivationStats::empty(a.feature_count);
    out.token_count = a.token_count + b.token_count;
    const long double na = static_cast<long double>(a.token_count);
    const long double nb = static_cast<long double>(b.token_count);
    const long double n = na + nb;
    for (std::size_t j = 0; j < a.feature_count; ++j) {
        const long double delta = static_cast<long double>(b.mean[j]) - a.mean[j];
        const long double m2 = static_cast<long double>(a.variance[j]) * na +
                               static_cast<long double>(b.variance[j]) * nb + delta * delta * na * nb / n;
        out.col_l2[j] = std::hypot(a.col_l2[j], b.col_l2[j]);
        out.mean[j] = static_cast<double>(a.mean[j] + delta * nb / n);
        out.variance[j] = std::max(0.0, static_cast<double>(m2 / n));
    }
    return out;
}

// SYMA: "SYMA1\0", u32 feature_count, u64 token_count, then f32 arrays col_l2, mean, variance.
inline constexpr std::string_view syma_magic{"SYMA1\0", 6};

inline bytes store_stats(const ActivationStats& s) {
    validate(s);
    bytes out;
    detail::byte_writer w(out);
    w.raw(syma_magic);
    w.u32(static_cast<std::uint32_t>(s.feature_count));
    w.u64(s.token_count);
    for (const auto* v : {&s.col_l2, &s.mean, &s.variance})
        for (double x : *v) w.f32(static_cast<float>(x));
    return out;
}

inline ActivationStats load_stats(std::span<const std::uint8_t> data) {
    detail::byte_reader r(data, "SYMA");
    r.expect_magic(syma_magic);
    ActivationStats s;
    s.feature_count = r.u32();
    s.token_count = r.u64();
    if (r.remaining() != 3 * 4 * static_cast<std::uint64_t>(s.feature_count))
        throw format_error("SYMA: payload size does not match header");
    for (auto* v : {&s.col_l2, &s.mean, &s.variance}) {
        v->resize(s.feature_count);
        for (double& x : *v) x = r.f32();
    }
    try {
        validate(s);
    } catch (const config_error& e) {
        throw format_error(std::string("SYMA: ") + e.what());
    }
    return s;
}

inline ActivationStats load_stats_file(const std::filesystem::path& p) { return load_stats(read_file(p)); }
inline void save_stats_file(const std::filesystem::path& p, const ActivationStats& s) {
    write_file(p, store_stats(s));
}

} // namespace symprune
