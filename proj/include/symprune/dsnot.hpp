// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symprune/calibration.hpp"
#include "symprune/errors.hpp"
#include "symprune/masking.hpp"
#include "symprune/matrix.hpp"

// Training-free prune-and-grow fine-tuning (DSnoT and its relative/regularized
// R2 variant).
//
// A "row" here is one output unit: the vector of its weights over the input
// features. With W stored as inputs x outputs (b x c), row q is column q of W
// and the candidate index r runs over input features, which is how the
// activation statistics are indexed. finetune() handles the transposition.
//
// Each cycle on row q:
//   E     = sum over pruned r of W[q,r] * mean[r]           (expected error)
//   grow  = argmax over pruned r of
//             sign(E) * v_r * mean[r] / max(var[r], floor) + g1 * ||kept row||_p
//           v_r = W[q,r], times D[q,r] when relative_grow
//   prune = argmin over kept r != grow with Delta(q,r) < 0 of
//             |W[q,r]| * ||X_r||_2^alpha (* D[q,r] when relative_prune) + g2 * ||kept row||_p
//           Delta(q,r) = sign(E) * W[q,r] * mean[r] (* D[q,r])
//   D[q,r] = 1/||kept row q||_1 + 1/||kept feature r over all rows||_1
// Vanilla DSnoT uses exponent 1, no D factor and no regularizer.
// sign(E) is taken from the cached error before the tentative grow.

namespace symprune {

enum class dsnot_variant { vanilla, r2 };

inline std::string to_string(dsnot_variant v) { return v == dsnot_variant::vanilla ? "vanilla" : "r2"; }

inline dsnot_variant parse_dsnot_variant(std::string_view s) {
    if (s == "vanilla") return dsnot_variant::vanilla;
    if (s == "r2") return dsnot_variant::r2;
    throw config_error("unknown DSnoT variant '" + std::string(s) + "'");
}

struct DsnotConfig {
    dsnot_variant variant = dsnot_variant::r2;
    unsigned max_cycles = 50;
    double update_threshold = 0.1;
    double gamma1 = 0.0;
    double gamma2 = 0.001;
    norm_order reg_p = norm_order::l2;
    double alpha = 0.5;
    bool relative_grow = false;
    bool relative_prune = true;
    double variance_floor = 1e-12;
};

/// Throws config_error on invalid values; returns non-fatal warnings.
inline std::vector<std::string> validate(const DsnotConfig& c) {
    if (c.max_cycles < 1) throw config_error("max_cycles must be >= 1");
    if (!(c.update_threshold >= 0.0)) throw config_error("update_threshold must be >= 0");
    if (!(c.gamma1 >= 0.0) || !(c.gamma2 >= 0.0)) throw config_error("gamma1/gamma2 must be >= 0");
    if (!(c.alpha >= 0.0)) throw config_error("alpha must be >= 0");
    if (!(c.variance_floor > 0.0)) throw config_error("variance_floor must be > 0");
    std::vector<std::string> warnings;
    if (c.variant == dsnot_variant::r2 && c.relative_grow && c.relative_prune)
        warnings.emplace_back("relative reweighting enabled in both grow and prune phases");
    return warnings;
}

/// Mutable view of one row during fine-tuning.
struct RowState {
    std::size_t q = 0;
    std::span<const double> dense;        // original weights of the row
    std::span<std::uint8_t> kept;         // 1 = kept, 0 = pruned
    double expected_error = 0.0;          // cached E[eps_q]
    double kept_l1 = 0.0;                 // ||kept part of row||_1
    std::span<double> feature_l1;         // kept l1 per feature across rows (shared)
    std::span<std::size_t> feature_kept;  // kept count per feature across rows (shared)
};

struct SwapRecord {
    std::size_t row = 0;
    std::size_t grown = 0;
    std::size_t pruned = 0;
    double expected_error_after = 0.0;
};

/// E[eps_q] = sum over pruned r of dense[r] * mean[r].
inline double expected_row_error(std::span<const double> dense, std::span<const std::uint8_t> kept,
                                 const ActivationStats& stats) {
    if (dense.size() != stats.feature_count || kept.size() != stats.feature_count)
        throw shape_error("expected_row_error: row length differs from feature_count");
    long double acc = 0;
    for (std::size_t r = 0; r < dense.size(); ++r)
        if (!kept[r]) acc += static_cast<long double>(dense[r]) * stats.mean[r];
    return static_cast<double>(acc);
}

inline double kept_row_norm(std::span<const double> dense, std::span<const std::uint8_t> kept, norm_order p) {
    return pnorm(dense.size(), [&](std::size_t r) { return kept[r] ? dense[r] : 0.0; }, p);
}

/// Builds a state with the cached error and row norm computed from scratch.
inline RowState make_row_state(std::size_t q, std::span<const double> dense, std::span<std::uint8_t> kept,
                               const ActivationStats& stats, std::span<double> feature_l1,
                               std::span<std::size_t> feature_kept) {
    RowState s{q, dense, kept, 0.0, 0.0, feature_l1, feature_kept};
    s.expected_error = expected_row_error(dense, kept, stats);
    s.kept_l1 = kept_row_norm(dense, kept, norm_order::l1);
    return s;
}

inline double relative_factor(const RowState& s, std::size_t r) {
    return safe_reciprocal(s.kept_l1) + safe_reciprocal(s.feature_l1[r]);
}

namespace detail {
inline double sign_of(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
} // namespace detail

inline std::optional<std::size_t> grow_index(const RowState& s, const ActivationStats& stats, const DsnotConfig& cfg) {
    const bool r2 = cfg.variant == dsnot_variant::r2;
    const double sign = detail::sign_of(s.expected_error);
    const double reg = r2 ? cfg.gamma1 * kept_row_norm(s.dense, s.kept, cfg.reg_p) : 0.0;
    std::optional<std::size_t> best;
    double best_value = 0.0;
    for (std::size_t r = 0; r < s.dense.size(); ++r) {
        if (s.kept[r]) continue;
        double v = s.dense[r];
        if (r2 && cfg.relative_grow) v *= relative_factor(s, r);
        const double value = sign * v * stats.mean[r] / std::max(stats.variance[r], cfg.variance_floor) + reg;
        if (!best || value > best_value) {
            best = r;
            best_value = value;
        }
    }
    return best;
}

/// Expects `grown` to be marked kept (tentative grow) in the state.
inline std::optional<std::size_t> prune_index(const RowState& s, std::size_t grown, const ActivationStats& stats,
                                              const DsnotConfig& cfg) {
    const bool r2 = cfg.variant == dsnot_variant::r2;
    const double sign = detail::sign_of(s.expected_error);
    const double reg = r2 ? cfg.gamma2 * kept_row_norm(s.dense, s.kept, cfg.reg_p) : 0.0;
    std::optional<std::size_t> best;
    double best_value = 0.0;
    for (std::size_t r = 0; r < s.dense.size(); ++r) {
        if (!s.kept[r] || r == grown) continue;
        const bool relative = r2 && cfg.relative_prune;
        const double d = relative ? relative_factor(s, r) : 1.0;
        double delta = sign * s.dense[r] * stats.mean[r];
        if (relative) delta *= d;
        if (!(delta < 0.0)) continue;
        double value = std::fabs(s.dense[r]) * (r2 ? std::pow(stats.col_l2[r], cfg.alpha) : stats.col_l2[r]);
        if (relative) value *= d;
        value += reg;
        if (!best || value < best_value) {
            best = r;
            best_value = value;
        }
    }
    return best;
}

/// Runs prune-and-grow cycles on one row. Returns the number of committed swaps.
inline unsigned finetune_row(RowState& s, const ActivationStats& stats, const DsnotConfig& cfg,
                             std::vector<SwapRecord>* trace = nullptr) {
    unsigned swaps = 0;
    for (unsigned cycle = 0; cycle < cfg.max_cycles; ++cycle) {
        if (std::fabs(s.expected_error) < cfg.update_threshold) break;
        const auto g = grow_index(s, stats, cfg);
        if (!g) break;

        const double kept_l1_before = s.kept_l1;
        s.kept[*g] = 1;
        s.kept_l1 = kept_row_norm(s.dense, s.kept, norm_order::l1);
        const auto p = prune_index(s, *g, stats, cfg);
        if (!p) {
            s.kept[*g] = 0;
            s.kept_l1 = kept_l1_before;
            break;
        }

        s.kept[*p] = 0;
        s.kept_l1 = kept_row_norm(s.dense, s.kept, norm_order::l1);
        s.expected_error = s.expected_error - s.dense[*g] * stats.mean[*g] + s.dense[*p] * stats.mean[*p];
        s.feature_l1[*g] += std::fabs(s.dense[*g]);
        ++s.feature_kept[*g];
        s.feature_l1[*p] -= std::fabs(s.dense[*p]);
        if (--s.feature_kept[*p] == 0) s.feature_l1[*p] = 0.0;
        ++swaps;
        if (trace) trace->push_back({s.q, *g, *p, s.expected_error});
    }
    return swaps;
}

struct FinetuneReport {
    std::size_t rows = 0;
    std::vector<unsigned> cycles;                 // committed swaps per row
    std::map<unsigned, std::size_t> cycles_histogram;
    double sum_abs_expected_error_before = 0.0;
    double sum_abs_expected_error_after = 0.0;
    double row_regularizer_sum_after = 0.0;       // sum over rows of ||kept row||_reg_p
    std::vector<double> feature_l1_after;         // incrementally maintained kept l1 per feature
    std::vector<SwapRecord> trace;                // filled when requested
    std::vector<std::string> warnings;
};

struct FinetuneResult {
    SparsityMask mask;
    FinetuneReport report;
};

/// Fine-tunes `mask` for weights W (inputs x outputs). Rows (output units) are
/// processed in index order; the kept count of every row is unchanged.
inline FinetuneResult finetune(const WeightMatrix& w, const SparsityMask& mask, const ActivationStats& stats,
                               const DsnotConfig& cfg, bool record_trace = false) {
    if (w.rows() != mask.rows() || w.cols() != mask.cols()) throw shape_error("finetune: W and mask differ in shape");
    if (stats.feature_count != w.rows())
        throw shape_error("finetune: stats describe " + std::to_string(stats.feature_count) + " features but W has " +
                          std::to_string(w.rows()) + " input rows");
    FinetuneResult result;
    auto& rep = result.report;
    rep.warnings = validate(cfg);

    const std::size_t features = w.rows();
    const std::size_t units = w.cols();
    const Matrix dense = transpose(w); // units x features
    std::vector<std::uint8_t> kept(units * features);
    for (std::size_t u = 0; u < units; ++u)
        for (std::size_t r = 0; r < features; ++r) kept[u * features + r] = mask.get(r, u) ? 1 : 0;

    std::vector<double> feature_l1(features);
    std::vector<std::size_t> feature_kept(features);
    for (std::size_t r = 0; r < features; ++r) {
        long double acc = 0;
        for (std::size_t u = 0; u < units; ++u)
            if (kept[u * features + r]) {
                acc += std::fabs(dense(u, r));
                ++feature_kept[r];
            }
        feature_l1[r] = static_cast<double>(acc);
    }

    rep.rows = units;
    rep.cycles.resize(units);
    std::size_t total_swaps = 0;
    for (std::size_t u = 0; u < units; ++u) {
        std::span<std::uint8_t> row_kept(kept.data() + u * features, features);
        RowState s = make_row_state(u, dense.row(u), row_kept, stats, feature_l1, feature_kept);
        rep.sum_abs_expected_error_before += std::fabs(s.expected_error);
        rep.cycles[u] = finetune_row(s, stats, cfg, record_trace ? &rep.trace : nullptr);
        total_swaps += rep.cycles[u];
        rep.sum_abs_expected_error_after += std::fabs(s.expected_error);
        rep.row_regularizer_sum_after += kept_row_norm(s.dense, s.kept, cfg.reg_p);
        ++rep.cycles_histogram[rep.cycles[u]];
    }
    rep.feature_l1_after = feature_l1;

    PatternDescriptor pattern = mask.pattern();
    if (total_swaps > 0 && pattern.kind == mask_pattern::n_m) {
        // Swaps keep per-output counts but not the N:M group structure.
        pattern = PatternDescriptor::unstructured(1.0 - static_cast<double>(pattern.n) / pattern.m,
                                                  pattern.axis == nm_axis::input_dim ? comparison_group::per_column
                                                                                     : comparison_group::per_layer);
    }
    result.mask = SparsityMask(features, units, false, pattern);
    for (std::size_t u = 0; u < units; ++u)
        for (std::size_t r = 0; r < features; ++r) result.mask.set(r, u, kept[u * features + r] != 0);
    return result;
}

} // namespace symprune
