// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symprune/errors.hpp"
#include "symprune/io.hpp"
#include "symprune/matrix.hpp"
#include "symprune/scores.hpp"

namespace symprune {

enum class mask_pattern : std::uint8_t { unstructured = 0, n_m = 1 };
enum class comparison_group : std::uint8_t { per_layer = 0, per_row = 1, per_column = 2 };
// input_dim: groups of m consecutive input features (down a column of W).
// output_dim: groups of m consecutive output features (along a row of W).
enum class nm_axis : std::uint8_t { input_dim = 0, output_dim = 1 };

inline std::string to_string(comparison_group g) {
    switch (g) {
    case comparison_group::per_layer: return "per_layer";
    case comparison_group::per_row: return "per_row";
    case comparison_group::per_column: return "per_column";
    }
    return "?";
}

inline comparison_group parse_comparison_group(std::string_view s) {
    if (s == "per_layer") return comparison_group::per_layer;
    if (s == "per_row") return comparison_group::per_row;
    if (s == "per_column") return comparison_group::per_column;
    throw config_error("unknown comparison group '" + std::string(s) + "'");
}

inline std::string to_string(nm_axis a) { return a == nm_axis::input_dim ? "input_dim" : "output_dim"; }

inline nm_axis parse_nm_axis(std::string_view s) {
    if (s == "input_dim") return nm_axis::input_dim;
    if (s == "output_dim") return nm_axis::output_dim;
    throw config_error("unknown N:M axis '" + std::string(s) + "'");
}

struct PatternDescriptor {
    mask_pattern kind = mask_pattern::unstructured;
    float epsilon = 0.0f; // declared sparsity, unstructured only
    comparison_group group = comparison_group::per_layer;
    std::uint8_t n = 0;
    std::uint8_t m = 0;
    nm_axis axis = nm_axis::input_dim;

    static PatternDescriptor unstructured(double eps, comparison_group g) {
        return {mask_pattern::unstructured, static_cast<float>(eps), g, 0, 0, nm_axis::input_dim};
    }
    static PatternDescriptor nm(unsigned n, unsigned m, nm_axis axis) {
        return {mask_pattern::n_m, 0.0f, comparison_group::per_layer, static_cast<std::uint8_t>(n),
                static_cast<std::uint8_t>(m), axis};
    }

    friend bool operator==(const PatternDescriptor&, const PatternDescriptor&) = default;
};

/// Keep(1)/prune(0) bits, row-major, packed most-significant bit first.
class SparsityMask {
public:
    SparsityMask() = default;
    SparsityMask(std::size_t rows, std::size_t cols, bool keep, PatternDescriptor pattern = {})
        : rows_(rows), cols_(cols), bits_((rows * cols + 7) / 8, 0), pattern_(pattern) {
        if (keep)
            for (std::size_t i = 0; i < rows * cols; ++i) set(i, true);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return rows_ * cols_; }

    bool get(std::size_t i) const noexcept { return (bits_[i >> 3] >> (7 - (i & 7))) & 1u; }
    bool get(std::size_t r, std::size_t c) const noexcept { return get(r * cols_ + c); }
    void set(std::size_t i, bool keep) noexcept {
        const auto bit = static_cast<std::uint8_t>(1u << (7 - (i & 7)));
        if (keep)
            bits_[i >> 3] |= bit;
        else
            bits_[i >> 3] &= static_cast<std::uint8_t>(~bit);
    }
    void set(std::size_t r, std::size_t c, bool keep) noexcept { set(r * cols_ + c, keep); }

    std::size_t count_kept() const noexcept {
        std::size_t n = 0;
        for (std::size_t i = 0; i < size(); ++i) n += get(i);
        return n;
    }

    std::span<const std::uint8_t> packed() const noexcept { return bits_; }
    const PatternDescriptor& pattern() const noexcept { return pattern_; }
    void set_pattern(const PatternDescriptor& p) noexcept { pattern_ = p; }

    friend bool operator==(const SparsityMask&, const SparsityMask&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> bits_;
    PatternDescriptor pattern_;
};

/// Number of entries pruned from a group of `group_size` at sparsity eps:
/// floor(eps * group_size). The 1e-9 slack absorbs representation error in
/// eps (0.29 * 100 must give 29, not 28).
inline std::size_t pruned_count(double eps, std::size_t group_size) {
    return static_cast<std::size_t>(std::floor(eps * static_cast<double>(group_size) + 1e-9));
}

/// Linear indices of each comparison group, ascending within a group.
inline std::vector<std::vector<std::size_t>> comparison_groups(std::size_t rows, std::size_t cols,
                                                               comparison_group g) {
    std::vector<std::vector<std::size_t>> out;
    switch (g) {
    case comparison_group::per_layer: {
        out.emplace_back(rows * cols);
        for (std::size_t i = 0; i < rows * cols; ++i) out[0][i] = i;
        break;
    }
    case comparison_group::per_row:
        for (std::size_t r = 0; r < rows; ++r) {
            auto& grp = out.emplace_back();
            for (std::size_t c = 0; c < cols; ++c) grp.push_back(r * cols + c);
        }
        break;
    case comparison_group::per_column:
        for (std::size_t c = 0; c < cols; ++c) {
            auto& grp = out.emplace_back();
            for (std::size_t r = 0; r < rows; ++r) grp.push_back(r * cols + c);
        }
        break;
    }
    return out;
}

/// Aligned N:M groups of linear indices. Throws when the grouped dimension is
/// not a multiple of m.
inline std::vector<std::vector<std::size_t>> nm_groups(std::size_t rows, std::size_t cols, unsigned m, nm_axis axis) {
    if (m == 0) throw config_error("N:M group size must be positive");
    const std::size_t dim = axis == nm_axis::input_dim ? rows : cols;
    if (dim % m != 0)
        throw config_error("N:M: " + to_string(axis) + " size " + std::to_string(dim) + " is not divisible by " +
                           std::to_string(m));
    std::vector<std::vector<std::size_t>> out;
    if (axis == nm_axis::input_dim) {
        for (std::size_t c = 0; c < cols; ++c)
            for (std::size_t r0 = 0; r0 < rows; r0 += m) {
                auto& grp = out.emplace_back();
                for (std::size_t i = 0; i < m; ++i) grp.push_back((r0 + i) * cols + c);
            }
    } else {
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c0 = 0; c0 < cols; c0 += m) {
                auto& grp = out.emplace_back();
                for (std::size_t i = 0; i < m; ++i) grp.push_back(r * cols + c0 + i);
            }
    }
    return out;
}

namespace detail {
inline void require_finite_scores(const ScoreMatrix& s) {
    for (double v : s.values())
        if (!std::isfinite(v)) throw config_error("score matrix contains non-finite entries");
}
} // namespace detail

/// Prunes the floor(eps * |group|) lowest scores of every comparison group.
/// Equal scores prune the lower linear index first.
inline SparsityMask build_unstructured_mask(const ScoreMatrix& s, double eps,
                                            comparison_group group = comparison_group::per_layer) {
    if (!(eps >= 0.0 && eps < 1.0)) throw config_error("sparsity must lie in [0, 1)");
    detail::require_finite_scores(s);
    SparsityMask mask(s.rows(), s.cols(), true, PatternDescriptor::unstructured(eps, group));
    const auto v = s.values();
    const auto lower = [&](std::size_t a, std::size_t b) { return v[a] < v[b] || (v[a] == v[b] && a < b); };
    for (auto& grp : comparison_groups(s.rows(), s.cols(), group)) {
        const std::size_t k = pruned_count(eps, grp.size());
        if (k == 0) continue;
        std::nth_element(grp.begin(), grp.begin() + static_cast<std::ptrdiff_t>(k - 1), grp.end(), lower);
        for (std::size_t i = 0; i < k; ++i) mask.set(grp[i], false);
    }
    return mask;
}

/// Keeps the n highest scores in each aligned group of m along `axis`.
/// Equal scores keep the lower linear index.
inline SparsityMask build_nm_mask(const ScoreMatrix& s, unsigned n, unsigned m, nm_axis axis = nm_axis::input_dim) {
    if (n == 0 || n > m) throw config_error("N:M requires 0 < n <= m");
    if (m > 255) throw config_error("N:M group size must fit in one byte");
    detail::require_finite_scores(s);
    SparsityMask mask(s.rows(), s.cols(), false, PatternDescriptor::nm(n, m, axis));
    const auto v = s.values();
    const auto higher = [&](std::size_t a, std::size_t b) { return v[a] > v[b] || (v[a] == v[b] && a < b); };
    for (auto& grp : nm_groups(s.rows(), s.cols(), m, axis)) {
        std::nth_element(grp.begin(), grp.begin() + static_cast<std::ptrdiff_t>(n - 1), grp.end(), higher);
        for (std::size_t i = 0; i < n; ++i) mask.set(grp[i], true);
    }
    return mask;
}

inline WeightMatrix apply_mask(const WeightMatrix& w, const SparsityMask& mask) {
    if (w.rows() != mask.rows() || w.cols() != mask.cols()) throw shape_error("apply_mask: shape mismatch");
    WeightMatrix out = w;
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i)
        if (!mask.get(i)) o[i] = 0.0;
    return out;
}

inline double mask_density(const SparsityMask& mask) {
    if (mask.size() == 0) return 1.0;
    return static_cast<double>(mask.count_kept()) / static_cast<double>(mask.size());
}

/// True when the bits satisfy the declared pattern: every unstructured group
/// has exactly floor(eps * |group|) zeros, every N:M group exactly n ones.
inline bool satisfies_pattern(const SparsityMask& mask) {
    const auto& p = mask.pattern();
    try {
        if (p.kind == mask_pattern::unstructured) {
            // The declared epsilon is an f32; accept any count produced by a
            // double epsilon that rounds to it.
            const double eps = p.epsilon;
            const double slack = std::ldexp(std::fabs(eps), -24);
            for (const auto& grp : comparison_groups(mask.rows(), mask.cols(), p.group)) {
                std::size_t zeros = 0;
                for (auto i : grp) zeros += !mask.get(i);
                if (zeros < pruned_count(std::max(0.0, eps - slack), grp.size()) ||
                    zeros > pruned_count(eps + slack, grp.size()))
                    return false;
            }
        } else {
            for (const auto& grp : nm_groups(mask.rows(), mask.cols(), p.m, p.axis)) {
                std::size_t ones = 0;
                for (auto i : grp) ones += mask.get(i);
                if (ones != p.n) return false;
            }
        }
    } catch (const config_error&) {
        return false;
    }
    return true;
}

// SYMM: "SYMM1\0", u32 rows, u32 cols, u8 pattern tag, f32 epsilon (0 for N:M),
// u8 n, u8 m, u8 axis, then ceil(rows*cols/8) bytes of bits, MSB first.
// For unstructured masks n = m = 0 and the axis byte carries the comparison group.
inline constexpr std::string_view symm_magic{"SYMM1\0", 6};

inline bytes encode_symm(const SparsityMask& mask) {
    bytes out;
    detail::byte_writer w(out);
    const auto& p = mask.pattern();
    w.raw(symm_magic);
    w.u32(static_cast<std::uint32_t>(mask.rows()));
    w.u32(static_cast<std::uint32_t>(mask.cols()));
    w.u8(static_cast<std::uint8_t>(p.kind));
    if (p.kind == mask_pattern::unstructured) {
        w.f32(p.epsilon);
        w.u8(0);
        w.u8(0);
        w.u8(static_cast<std::uint8_t>(p.group));
    } else {
        w.f32(0.0f);
        w.u8(p.n);
        w.u8(p.m);
        w.u8(static_cast<std::uint8_t>(p.axis));
    }
    w.raw(mask.packed());
    return out;
}

inline SparsityMask decode_symm(std::span<const std::uint8_t> data) {
    detail::byte_reader r(data, "SYMM");
    r.expect_magic(symm_magic);
    const std::size_t rows = r.u32();
    const std::size_t cols = r.u32();
    const std::uint8_t tag = r.u8();
    const float eps = r.f32();
    const std::uint8_t n = r.u8();
    const std::uint8_t m = r.u8();
    const std::uint8_t axis = r.u8();
    PatternDescriptor p;
    if (tag == static_cast<std::uint8_t>(mask_pattern::unstructured)) {
        if (axis > 2) throw format_error("SYMM: bad comparison group");
        if (!(eps >= 0.0f && eps < 1.0f)) throw format_error("SYMM: bad epsilon");
        p = PatternDescriptor::unstructured(eps, static_cast<comparison_group>(axis));
        p.epsilon = eps;
    } else if (tag == static_cast<std::uint8_t>(mask_pattern::n_m)) {
        if (axis > 1) throw format_error("SYMM: bad N:M axis");
        if (n == 0 || n > m) throw format_error("SYMM: bad N:M parameters");
        p = PatternDescriptor::nm(n, m, static_cast<nm_axis>(axis));
    } else {
        throw format_error("SYMM: unknown pattern tag");
    }
    const auto packed = r.take((rows * cols + 7) / 8);
    r.expect_end();
    SparsityMask mask(rows, cols, false, p);
    for (std::size_t i = 0; i < rows * cols; ++i) mask.set(i, (packed[i >> 3] >> (7 - (i & 7))) & 1u);
    return mask;
}

inline SparsityMask load_symm(const std::filesystem::path& path) { return decode_symm(read_file(path)); }
inline void save_symm(const std::filesystem::path& path, const SparsityMask& m) { write_file(path, encode_symm(m)); }

} // namespace symprune
