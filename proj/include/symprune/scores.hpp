// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symprune/calibration.hpp"
#include "symprune/errors.hpp"
#include "symprune/matrix.hpp"
#include "symprune/random.hpp"

namespace symprune {

/// Per-weight importance, same shape as W. Higher means kept.
using ScoreMatrix = Matrix;

enum class score_method { magnitude, wanda, owanda, symmetric, general_sym, lp, ria, stochria, strategy };
enum class score_strategy { s1, s2, s3, s4 };
enum class symmetric_variant { sum_norm, root_sum_square };

struct ScoreConfig {
    score_method method = score_method::ria;
    double alpha = 0.5;
    norm_order p = norm_order::l1;
    double beta = 0.1;
    std::uint64_t seed = 0;
    score_strategy strategy = score_strategy::s1;
    symmetric_variant variant = symmetric_variant::root_sum_square;
    // StochRIA only: scores are averaged over seeds seed .. seed+trials-1.
    unsigned trials = 1;
};

inline std::string to_string(score_method m) {
    switch (m) {
    case score_method::magnitude: return "magnitude";
    case score_method::wanda: return "wanda";
    case score_method::owanda: return "owanda";
    case score_method::symmetric: return "symmetric";
    case score_method::general_sym: return "general_sym";
    case score_method::lp: return "lp";
    case score_method::ria: return "ria";
    case score_method::stochria: return "stochria";
    case score_method::strategy: return "strategy";
    }
    return "?";
}

inline score_method parse_score_method(std::string_view s) {
    for (auto m : {score_method::magnitude, score_method::wanda, score_method::owanda, score_method::symmetric,
                   score_method::general_sym, score_method::lp, score_method::ria, score_method::stochria,
                   score_method::strategy})
        if (s == to_string(m)) return m;
    throw config_error("unknown score method '" + std::string(s) + "'");
}

inline std::string to_string(score_strategy s) {
    switch (s) {
    case score_strategy::s1: return "S1";
    case score_strategy::s2: return "S2";
    case score_strategy::s3: return "S3";
    case score_strategy::s4: return "S4";
    }
    return "?";
}

inline score_strategy parse_score_strategy(std::string_view s) {
    if (s == "S1" || s == "s1") return score_strategy::s1;
    if (s == "S2" || s == "s2") return score_strategy::s2;
    if (s == "S3" || s == "s3") return score_strategy::s3;
    if (s == "S4" || s == "s4") return score_strategy::s4;
    throw config_error("unknown strategy '" + std::string(s) + "'");
}

inline std::string to_string(symmetric_variant v) {
    return v == symmetric_variant::sum_norm ? "sum_norm" : "root_sum_square";
}

inline symmetric_variant parse_symmetric_variant(std::string_view s) {
    if (s == "sum_norm") return symmetric_variant::sum_norm;
    if (s == "root_sum_square") return symmetric_variant::root_sum_square;
    throw config_error("unknown symmetric variant '" + std::string(s) + "'");
}

inline void validate(const ScoreConfig& c) {
    if (!(c.alpha >= 0.0) || !std::isfinite(c.alpha)) throw config_error("alpha must be >= 0");
    if (!(c.beta > 0.0 && c.beta <= 1.0)) throw config_error("beta must lie in (0, 1]");
    if (c.trials == 0) throw config_error("trials must be >= 1");
}

namespace detail {

inline void require_features(const WeightMatrix& w, const ActivationStats& s, const char* who) {
    if (s.feature_count != w.rows())
        throw shape_error(std::string(who) + ": stats describe " + std::to_string(s.feature_count) +
                          " features but W has " + std::to_string(w.rows()) + " rows");
}

// Multiplies row j by col_l2[j]^alpha.
inline void apply_activation(ScoreMatrix& s, const ActivationStats& stats, double alpha) {
    for (std::size_t j = 0; j < s.rows(); ++j) {
        const double f = std::pow(stats.col_l2[j], alpha);
        for (double& v : s.row(j)) v *= f;
    }
}

// |W_jk| * (1/row[j] + 1/col[k]) with 1/0 := 0.
inline ScoreMatrix reciprocal_norm_score(const WeightMatrix& w, std::span<const double> row_norm,
                                         std::span<const double> col_norm) {
    ScoreMatrix s(w.rows(), w.cols());
    for (std::size_t j = 0; j < w.rows(); ++j)
        for (std::size_t k = 0; k < w.cols(); ++k)
            s(j, k) = std::fabs(w(j, k)) * (safe_reciprocal(row_norm[j]) + safe_reciprocal(col_norm[k]));
    return s;
}

} // namespace detail

inline ScoreMatrix score_magnitude(const WeightMatrix& w) {
    ScoreMatrix s = w;
    for (double& v : s.values()) v = std::fabs(v);
    return s;
}

/// |W_jk| * (x[j] + y[k]): the exact single-weight cost of the symmetric objective
/// when x holds the column norms of X and y the row norms of Y.
inline ScoreMatrix score_general_sym(const WeightMatrix& w, std::span<const double> x_col_norms,
                                     std::span<const double> y_row_norms) {
    if (x_col_norms.size() != w.rows() || y_row_norms.size() != w.cols())
        throw shape_error("score_general_sym: norm vectors must have lengths " + std::to_string(w.rows()) +
                          " and " + std::to_string(w.cols()));
    ScoreMatrix s(w.rows(), w.cols());
    for (std::size_t j = 0; j < w.rows(); ++j)
        for (std::size_t k = 0; k < w.cols(); ++k)
            s(j, k) = std::fabs(w(j, k)) * (x_col_norms[j] + y_row_norms[k]);
    return s;
}

inline ScoreMatrix score_wanda(const WeightMatrix& w, const ActivationStats& stats, double alpha) {
    detail::require_features(w, stats, "score_wanda");
    ScoreMatrix s = score_magnitude(w);
    detail::apply_activation(s, stats, alpha);
    return s;
}

/// Output-side Wanda: |W_jk| * ||Y_k:||_2.
inline ScoreMatrix score_owanda(const WeightMatrix& w, std::span<const double> y_row_norms) {
    const std::vector<double> zero(w.rows(), 0.0);
    return score_general_sym(w, zero, y_row_norms);
}

inline ScoreMatrix score_symmetric(const WeightMatrix& w, symmetric_variant variant) {
    const auto rn = row_pnorm(w, norm_order::l2);
    const auto cn = col_pnorm(w, norm_order::l2);
    ScoreMatrix s(w.rows(), w.cols());
    for (std::size_t j = 0; j < w.rows(); ++j)
        for (std::size_t k = 0; k < w.cols(); ++k) {
            const double a = std::fabs(w(j, k));
            s(j, k) = variant == symmetric_variant::sum_norm ? a * (rn[j] + cn[k])
                                                            : a * std::sqrt(rn[j] * rn[j] + cn[k] * cn[k]);
        }
    return s;
}

/// Relative importance with p-norms: |W_jk| * (1/||W_j:||_p + 1/||W_:k||_p).
inline ScoreMatrix score_lp(const WeightMatrix& w, norm_order p) {
    const auto rn = row_pnorm(w, p);
    const auto cn = col_pnorm(w, p);
    return detail::reciprocal_norm_score(w, rn, cn);
}

inline ScoreMatrix score_ria(const WeightMatrix& w, const ActivationStats& stats, double alpha,
                             norm_order p = norm_order::l1) {
    detail::require_features(w, stats, "score_ria");
    ScoreMatrix s = score_lp(w, p);
    detail::apply_activation(s, stats, alpha);
    return s;
}

/// Index sets drawn for one StochRIA evaluation. row_samples[j] indexes columns
/// of W, col_samples[k] indexes rows; both ascending.
struct StochSamples {
    std::size_t tau = 0;
    std::vector<std::vector<std::size_t>> row_samples;
    std::vector<std::vector<std::size_t>> col_samples;
};

inline std::size_t stochria_tau(std::size_t rows, std::size_t cols, double beta) {
    const double t = std::floor(beta * static_cast<double>(std::min(rows, cols)));
    return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

inline constexpr std::uint64_t stream_rows = 0;
inline constexpr std::uint64_t stream_cols = 1;

inline StochSamples draw_stochria_samples(std::size_t rows, std::size_t cols, double beta, std::uint64_t seed) {
    if (!(beta > 0.0 && beta <= 1.0)) throw config_error("beta must lie in (0, 1]");
    StochSamples out;
    out.tau = stochria_tau(rows, cols, beta);
    out.row_samples.reserve(rows);
    for (std::size_t j = 0; j < rows; ++j) {
        auto eng = keyed_engine(seed, stream_rows, j);
        out.row_samples.push_back(sample_without_replacement(eng, cols, out.tau));
    }
    out.col_samples.reserve(cols);
    for (std::size_t k = 0; k < cols; ++k) {
        auto eng = keyed_engine(seed, stream_cols, k);
        out.col_samples.push_back(sample_without_replacement(eng, rows, out.tau));
    }
    return out;
}

/// StochRIA for fixed index sets. Sampled l1 norms are reduced in ascending
/// index order with the same kernel as the full norms, so full support
/// reproduces score_ria bit for bit.
inline ScoreMatrix score_stochria(const WeightMatrix& w, const StochSamples& samples,
                                  const ActivationStats* stats, double alpha) {
    if (samples.row_samples.size() != w.rows() || samples.col_samples.size() != w.cols())
        throw shape_error("score_stochria: sample sets do not match W");
    if (stats) detail::require_features(w, *stats, "score_stochria");
    std::vector<double> rn(w.rows()), cn(w.cols());
    for (std::size_t j = 0; j < w.rows(); ++j) {
        const auto& idx = samples.row_samples[j];
        rn[j] = pnorm(idx.size(), [&](std::size_t i) { return w(j, idx[i]); }, norm_order::l1);
    }
    for (std::size_t k = 0; k < w.cols(); ++k) {
        const auto& idx = samples.col_samples[k];
        cn[k] = pnorm(idx.size(), [&](std::size_t i) { return w(idx[i], k); }, norm_order::l1);
    }
    ScoreMatrix s = detail::reciprocal_norm_score(w, rn, cn);
    if (stats) detail::apply_activation(s, *stats, alpha);
    return s;
}

inline ScoreMatrix score_stochria(const WeightMatrix& w, const ActivationStats* stats, double alpha, double beta,
                                  std::uint64_t seed) {
    return score_stochria(w, draw_stochria_samples(w.rows(), w.cols(), beta, seed), stats, alpha);
}

/// Mean of score_stochria over seeds seed .. seed+trials-1.
inline ScoreMatrix score_stochria_mean(const WeightMatrix& w, const ActivationStats* stats, double alpha,
                                       double beta, std::uint64_t seed, unsigned trials) {
    if (trials == 0) throw config_error("trials must be >= 1");
    if (trials == 1) return score_stochria(w, stats, alpha, beta, seed);
    ScoreMatrix acc(w.rows(), w.cols());
    for (unsigned t = 0; t < trials; ++t) acc = acc + score_stochria(w, stats, alpha, beta, seed + t);
    return (1.0 / trials) * acc;
}

/// Row/column norm combinations from the strategy ablation:
///   S1 |W|(1/r + 1/c)   S2 |W|/(r + c)   S3 |W|(r + c)   S4 |W|/(1/r + 1/c)
/// Zero denominators give score 0.
inline ScoreMatrix score_strategy(const WeightMatrix& w, norm_order p, score_strategy strategy) {
    if (strategy == score_strategy::s1) return score_lp(w, p);
    const auto rn = row_pnorm(w, p);
    const auto cn = col_pnorm(w, p);
    ScoreMatrix s(w.rows(), w.cols());
    for (std::size_t j = 0; j < w.rows(); ++j)
        for (std::size_t k = 0; k < w.cols(); ++k) {
            const double a = std::fabs(w(j, k));
            switch (strategy) {
            case score_strategy::s2: s(j, k) = a * safe_reciprocal(rn[j] + cn[k]); break;
            case score_strategy::s3: s(j, k) = a * (rn[j] + cn[k]); break;
            case score_strategy::s4:
                s(j, k) = a * safe_reciprocal(safe_reciprocal(rn[j]) + safe_reciprocal(cn[k]));
                break;
            case score_strategy::s1: break;
            }
        }
    return s;
}

/// Optional side inputs for compute_scores.
struct ScoreInputs {
    const ActivationStats* stats = nullptr;
    // Row norms ||Y_k:||_2 of the output calibration; empty means Y = 0.
    std::span<const double> y_row_norms{};
};

inline bool requires_stats(const ScoreConfig& c) {
    switch (c.method) {
    case score_method::wanda:
    case score_method::ria:
    case score_method::general_sym: return true;
    case score_method::stochria: return c.alpha > 0.0;
    default: return false;
    }
}

inline bool requires_output_norms(const ScoreConfig& c) { return c.method == score_method::owanda; }

inline ScoreMatrix compute_scores(const WeightMatrix& w, const ScoreConfig& cfg, const ScoreInputs& in = {}) {
    validate(cfg);
    if (requires_stats(cfg) && !in.stats)
        throw config_error("method " + to_string(cfg.method) + " requires activation statistics");
    if (requires_output_norms(cfg) && in.y_row_norms.empty())
        throw config_error("method owanda requires output calibration norms");
    switch (cfg.method) {
    case score_method::magnitude: return score_magnitude(w);
    case score_method::wanda: return score_wanda(w, *in.stats, cfg.alpha);
    case score_method::owanda: return score_owanda(w, in.y_row_norms);
    case score_method::symmetric: return score_symmetric(w, cfg.variant);
    case score_method::general_sym: {
        detail::require_features(w, *in.stats, "score_general_sym");
        const std::vector<double> zero(w.cols(), 0.0);
        return score_general_sym(w, in.stats->col_l2,
                                 in.y_row_norms.empty() ? std::span<const double>(zero) : in.y_row_norms);
    }
    case score_method::lp: return score_lp(w, cfg.p);
    case score_method::ria: return score_ria(w, *in.stats, cfg.alpha, cfg.p);
    case score_method::stochria:
        return score_stochria_mean(w, in.stats, cfg.alpha, cfg.beta, cfg.seed, cfg.trials);
    case score_method::strategy: return score_strategy(w, cfg.p, cfg.strategy);
    }
    throw config_error("unhandled score method");
}

} // namespace symprune
