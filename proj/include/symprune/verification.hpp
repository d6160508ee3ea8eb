// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symprune/errors.hpp"
#include "symprune/masking.hpp"
#include "symprune/matrix.hpp"
#include "symprune/random.hpp"
#include "symprune/reconstruction.hpp"
#include "symprune/scores.hpp"

// Numeric certificates for the score constructions: each check builds the
// calibration matrices a score is claimed to arise from and compares the
// resulting norms or objective values with the closed-form score.

namespace symprune {

inline constexpr double default_rel_tol = 1e-9;
inline constexpr double default_abs_tol = 1e-12;

struct VerificationOutcome {
    std::string name;
    std::size_t trials = 0;
    double max_deviation = 0.0;
    double tolerance = default_rel_tol;
    bool passed = true;
};

/// |got - ref| / max(|ref|, abs_tol / rel_tol): relative error for ordinary
/// references, absolute error scaled onto the same threshold near zero, so
/// deviation <= rel_tol means "within rel_tol relative or abs_tol absolute".
inline double scaled_deviation(double got, double ref, double rel_tol = default_rel_tol,
                               double abs_tol = default_abs_tol) {
    return std::fabs(got - ref) / std::max(std::fabs(ref), abs_tol / rel_tol);
}

namespace detail {

class outcome_builder {
public:
    outcome_builder(std::string name, double tol) {
        out_.name = std::move(name);
        out_.tolerance = tol;
    }
    void add(double got, double ref) { out_.max_deviation = std::max(out_.max_deviation, scaled_deviation(got, ref)); }
    void trial() { ++out_.trials; }
    VerificationOutcome finish() {
        out_.passed = out_.max_deviation <= out_.tolerance;
        return out_;
    }

private:
    VerificationOutcome out_;
};

inline std::size_t draw_dim(std::mt19937_64& eng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(uniform_below(eng, hi - lo + 1));
}

// Streams for keyed_engine so each check draws from its own sequence.
enum : std::uint64_t {
    stream_single_prune = 100,
    stream_l1_constructions,
    stream_ria,
    stream_general,
    stream_lp,
    stream_unit,
    stream_stoch,
    stream_gid,
    stream_oracle,
    stream_gap,
    stream_striped,
    stream_degeneracy,
};

inline void require_positive(std::span<const double> norms, const char* what) {
    for (double n : norms)
        if (!(n > 0.0)) throw config_error(std::string(what) + ": zero norm");
}

} // namespace detail

/// Matrix with i.i.d. entries uniform in [lo, hi).
inline Matrix random_uniform_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& eng, double lo = -1.0,
                                    double hi = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.values()) v = uniform(eng, lo, hi);
    return m;
}

inline Matrix random_normal_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& eng, double scale = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.values()) v = scale * normal(eng);
    return m;
}

inline WeightMatrix prune_single(const WeightMatrix& w, std::size_t j, std::size_t k) {
    WeightMatrix out = w;
    out(j, k) = 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Single-weight identity for the symmetric objective.

inline VerificationOutcome verify_lemma1(std::size_t trials, std::size_t max_dim, std::uint64_t seed,
                                         double tol = default_rel_tol) {
    if (max_dim < 1) throw config_error("verify_lemma1: max_dim must be >= 1");
    detail::outcome_builder ob("single_prune_identity", tol);
    for (std::size_t t = 0; t < trials; ++t) {
        auto eng = keyed_engine(seed, detail::stream_single_prune, t);
        const std::size_t a = detail::draw_dim(eng, 1, max_dim), b = detail::draw_dim(eng, 1, max_dim);
        const std::size_t c = detail::draw_dim(eng, 1, max_dim), d = detail::draw_dim(eng, 1, max_dim);
        const Matrix x = random_normal_matrix(a, b, eng);
        const Matrix y = random_normal_matrix(c, d, eng);
        const Matrix w = random_normal_matrix(b, c, eng);
        const std::size_t j = uniform_below(eng, b), k = uniform_below(eng, c);
        const double g = sym_objective(x, y, w, prune_single(w, j, k)).value;
        const double s = std::fabs(w(j, k)) * (col_pnorm(x, norm_order::l2)[j] + row_pnorm(y, norm_order::l2)[k]);
        ob.add(g, s);
        ob.trial();
    }
    return ob.finish();
}

// ---------------------------------------------------------------------------
// Calibration matrices that reproduce relative importance.

enum class thm2_variant { v1_constant, v2_diagonal };

/// Returns (X, Y), X b x b and Y c x c, with
/// ||X_:j||_2 + ||Y_k:||_2 = 1/||W_j:||_1 + 1/||W_:k||_1 for all j, k.
inline std::pair<Matrix, Matrix> construct_thm2(const WeightMatrix& w, thm2_variant variant) {
    const auto rn = row_pnorm(w, norm_order::l1);
    const auto cn = col_pnorm(w, norm_order::l1);
    detail::require_positive(rn, "construct_thm2 row");
    detail::require_positive(cn, "construct_thm2 column");
    const std::size_t b = w.rows(), c = w.cols();
    if (variant == thm2_variant::v1_constant) {
        Matrix x(b, b), y(c, c);
        for (std::size_t j = 0; j < b; ++j) {
            const double t = 1.0 / (std::sqrt(static_cast<double>(b)) * rn[j]);
            for (std::size_t i = 0; i < b; ++i) x(i, j) = t;
        }
        for (std::size_t k = 0; k < c; ++k) {
            const double s = 1.0 / (std::sqrt(static_cast<double>(c)) * cn[k]);
            for (std::size_t i = 0; i < c; ++i) y(k, i) = s;
        }
        return {x, y};
    }
    std::vector<double> dx(b), dy(c);
    for (std::size_t j = 0; j < b; ++j) dx[j] = 1.0 / rn[j];
    for (std::size_t k = 0; k < c; ++k) dy[k] = 1.0 / cn[k];
    return {Matrix::diagonal(dx), Matrix::diagonal(dy)};
}

inline VerificationOutcome verify_thm2(std::size_t trials, std::size_t max_dim, std::uint64_t seed,
                                       double tol = default_rel_tol) {
    detail::outcome_builder ob("l1_reciprocal_constructions", tol);
    for (std::size_t t = 0; t < trials; ++t) {
        auto eng = keyed_engine(seed, detail::stream_l1_constructions, t);
        const std::size_t b = detail::draw_dim(eng, 1, max_dim), c = detail::draw_dim(eng, 1, max_dim);
        const Matrix w = random_normal_matrix(b, c, eng);
        const auto rn = row_pnorm(w, norm_order::l1);
        const auto cn = col_pnorm(w, norm_order::l1);
        for (auto variant : {thm2_variant::v1_constant, thm2_variant::v2_diagonal}) {
            const auto [x, y] = construct_thm2(w, variant);
            const auto xn = col_pnorm(x, norm_order::l2);
            const auto yn = row_pnorm(y, norm_order::l2);
            for (std::size_t j = 0; j < w.rows(); ++j)
                for (std::size_t k = 0; k < w.cols(); ++k) ob.add(xn[j] + yn[k], 1.0 / rn[j] + 1.0 / cn[k]);
        }
        ob.trial();
    }
    return ob.finish();
}

/// Single-entry A (b x b) and B (c x c) with
/// ||A_j:||_2 + ||B_:k||_2 = (1/||W_j:||_1 + 1/||W_:k||_1) * ||C_:j||_2^alpha.
inline std::pair<Matrix, Matrix> construct_ria(const WeightMatrix& w, const Matrix& c, double alpha, std::size_t j,
                                               std::size_t k, std::size_t p_col, std::size_t s_row) {
    if (j >= w.rows() || k >= w.cols() || p_col >= w.rows() || s_row >= w.cols())
        throw config_error("construct_ria: index out of range");
    if (c.cols() != w.rows()) throw shape_error("construct_ria: C must have one column per row of W");
    const double rn = pnorm(w.row(j), norm_order::l1);
    const double cn = col_pnorm(w, norm_order::l1)[k];
    if (!(rn > 0.0) || !(cn > 0.0)) throw config_error("construct_ria: zero norm");
    const double act = std::pow(col_pnorm(c, norm_order::l2)[j], alpha);
    Matrix a(w.rows(), w.rows()), b(w.cols(), w.cols());
    a(j, p_col) = act / rn;
    b(s_row, k) = act / cn;
    return {a, b};
}

inline VerificationOutcome verify_ria(std::size_t trials, std::size_t max_dim, std::uint64_t seed,
                                      double tol = default_rel_tol) {
    detail::outcome_builder ob("ria_construction", tol);
    for (std::size_t t = 0; t < trials; ++t) {
        auto eng = keyed_engine(seed, detail::stream_ria, t);
        const std::size_t b = detail::draw_dim(eng, 1, max_dim), c = detail::draw_dim(eng, 1, max_dim);
        const Matrix w = random_normal_matrix(b, c, eng);
        const Matrix cal = random_normal_matrix(detail::draw_dim(eng, 1, max_dim), b, eng);
        const double alpha = uniform(eng, 0.0, 2.0);
        const std::size_t j = uniform_below(eng, b), k = uniform_below(eng, c);
        const std::size_t p = uniform_below(eng, b), s = uniform_below(eng, c);
        const auto [a, bm] = construct_ria(w, cal, alpha, j, k, p, s);
        const double got = row_pnorm(a, norm_order::l2)[j] + col_pnorm(bm, norm_order::l2)[k];
        const double ref = (1.0 / pnorm(w.row(j), norm_order::l1) + 1.0 / col_pnorm(w, norm_order::l1)[k]) *
                           std::pow(col_pnorm(cal, norm_order::l2)[j], alpha);
        ob.add(got, ref);
        ob.trial();
    }
    return ob.finish();
}

struct GeneralDiagCheck {
    Matrix lhs; // ||(A D_X)_:j||_2 + ||(D_Y B)_k:||_2
    Matrix rhs; // ||A_:j||_2 / ||W_j:||_1 + ||B_k:||_2 / ||W_:k||_1
    double max_deviation = 0.0;
};

/// Diagonal reweighting of arbitrary A (a x b) and B (c x d) by reciprocal l1
/// norms of W, evaluated both through the matrix products and in closed form.
inline GeneralDiagCheck construct_general_diag(const Matrix& a, const Matrix& b, const WeightMatrix& w) {
    if (a.cols() != w.rows() || b.rows() != w.cols()) throw shape_error("construct_general_diag: shape mismatch");
    const auto rn = row_pnorm(w, norm_order::l1);
    const auto cn = col_pnorm(w, norm_order::l1);
    detail::require_positive(rn, "construct_general_diag row");
    detail::require_positive(cn, "construct_general_diag column");
    std::vector<double> dx(rn.size()), dy(cn.size());
    for (std::size_t i = 0; i < rn.size(); ++i) dx[i] = 1.0 / rn[i];
    for (std::size_t i = 0; i < cn.size(); ++i) dy[i] = 1.0 / cn[i];
    const auto ad = col_pnorm(matmul(a, Matrix::diagonal(dx)), norm_order::l2);
    const auto db = row_pnorm(matmul(Matrix::diagonal(dy), b), norm_order::l2);
    const auto an = col_pnorm(a, norm_order::l2);
    const auto bn = row_pnorm(b, norm_order::l2);
    GeneralDiagCheck out{Matrix(w.rows(), w.cols()), Matrix(w.rows(), w.cols()), 0.0};
    for (std::size_t j = 0; j < w.rows(); ++j)
        for (std::size_t k = 0; k < w.cols(); ++k) {
            out.lhs(j, k) = ad[j] + db[k];
            out.rhs(j, k) = an[j] / rn[j] + bn[k] / cn[k];
            out.max_deviation = std::max(out.max_deviation, scaled_deviation(out.lhs(j, k), out.rhs(j, k)));
        }
    return out;
}

inline VerificationOutcome verify_general_diag(std::size_t trials, std::size_t max_dim, std::uint64_t seed,
                                               double tol = default_rel_tol) {
    detail::outcome_builder ob("general_diag_construction", tol);
    for (std::size_t t = 0; t < trials; ++t) {
        auto eng = keyed_engine(seed, detail::stream_general, t);
        const std::size_t b = detail::draw_dim(eng, 1, max_dim), c = detail::draw_dim(eng, 1, max_dim);
        const Matrix w = random_normal_matrix(b, c, eng);
        const Matrix a = random_normal_matrix(detail::draw_dim(eng, 1, max_dim), b, eng);
        const Matrix bm = random_normal_matrix(c, detail::draw_dim(eng, 1, max_dim), eng);
        const auto chk = construct_general_diag(a, bm, w);
        for (std::size_t i = 0; i < chk.lhs.size(); ++i) ob.add(chk.lhs.values()[i], chk.rhs.values()[i]);
        ob.trial();
    }
    return ob.finish();
}

enum class lp_mode { weight_proportional, unit_vector };

/// Columns X_:j (stored as columns of x) and rows Y_k: (rows of y) with
/// ||X_:j||_2 = 1/||W_j:||_p and ||Y_k:||_2 = 1/||W_:k||_p.
/// weight_proportional: x is c x b, y is c x b. unit_vector: x is |u| x b, y is c x |v|.
inline std::pair<Matrix, Matrix> construct_lp(const WeightMatrix& w, norm_order p, lp_mode mode,
                                              std::span<const double> u = {}, std::span<const double> v = {}) {
    const std::size_t b = w.rows(), c = w.cols();
    const auto rp = row_pnorm(w, p);
    const auto cp = col_pnorm(w, p);
    detail::require_positive(rp, "construct_lp row");
    detail::require_positive(cp, "construct_lp column");
    if (mode == lp_mode::weight_proportional) {
        const auto r2 = row_pnorm(w, norm_order::l2);
        const auto c2 = col_pnorm(w, norm_order::l2);
        Matrix x(c, b), y(c, b);
        for (std::size_t j = 0; j < b; ++j)
            for (std::size_t i = 0; i < c; ++i) x(i, j) = w(j, i) / (rp[j] * r2[j]);
        for (std::size_t k = 0; k < c; ++k)
            for (std::size_t i = 0; i < b; ++i) y(k, i) = w(i, k) / (cp[k] * c2[k]);
        return {x, y};
    }
    if (u.empty() || v.empty()) throw config_error("construct_lp: unit_vector mode needs u and v");
    for (auto vec : {u, v})
        if (std::fabs(pnorm(vec, norm_order::l2) - 1.0) > 1e-12) throw config_error("construct_lp: u, v must be unit vectors");
    Matrix x(u.size(), b), y(c, v.size());
    for (std::size_t j = 0; j < b; ++j)
        for (std::size_t i = 0; i < u.size(); ++i) x(i, j) = u[i] / rp[j];
    for (std::size_t k = 0; k < c; ++k)
        for (std::size_t i = 0; i < v.size(); ++i) y(k, i) = v[i] / cp[k];
    return {x, y};
}

inline std::vector<double> random_unit_vector(std::mt19937_64& eng, std::size_t n) {
    std::vector<double> v(n);
    double norm = 0.0;
    do {
        for (double& x : v) x = normal(eng);
        norm = pnorm(v, norm_order::l2);
    } while (norm == 0.0);
    for (double& x : v) x /= norm;
    return v;
}

inline VerificationOutcome verify_lp(lp_mode mode, std::size_t trials, std::size_t max_dim, std::uint64_t seed,
                                     double tol = default_rel_tol) {
    detail::outcome_builder ob(mode == lp_mode::weight_proportional ? "lp_weight_proportional"
                                                                    : "lp_unit_vector",
                               tol);
    constexpr norm_order orders[] = {norm_order::l0, norm_order::l1, norm_order::l2,
                                     norm_order::l3, norm_order::l4, norm_order::inf};
    for (std::size_t t = 0; t < trials; ++t) {
        auto eng = keyed_engine(seed, mode == lp_mode::weight_proportional ? detail::stream_lp : detail::stream_unit, t);
        const std::size_t b = detail::draw_dim(eng, 1, max_dim), c = detail::draw_dim(eng, 1, max_dim);
        const Matrix w = random_normal_matrix(b, c, eng);
        const norm_order p = orders[uniform_below(eng, std::size(orders))];
        std::vector<double> u, v;
        if (mode == lp_mode::unit_vector) {
            u = random_unit_vector(eng, detail::draw_dim(eng, 1, max_dim));
            v = random_unit_vector(eng, detail::draw_dim(eng, 1, max_dim));
        }
        const auto [x, y] = construct_lp(w, p, mode, u, v);
        const auto xn = col_pnorm(x, norm_order::l2);
        const auto yn = row_pnorm(y, norm_order::l2);
        const auto rp = row_pnorm(w, p);
        const auto cp = col_pnorm(w, p);
        for (std::size_t j = 0; j < w.rows(); ++j) ob.add(xn[j], 1.0 / rp[j]);
        for (std::size_t k = 0; k < w.cols(); ++k) ob.add(yn[k], 1.0 / cp[k]);
        ob.trial();
    }
    return ob.finish();
}

/// Indicator vectors on the sampled index sets, scaled so that
/// ||x||_2 = 1/||W_{j,S_j}||_1 (x has length c) and ||y||_2 = 1/||W_{S_k,k}||_1 (length b).
inline std::pair<std::vector<double>, std::vector<double>>
construct_stochria(const WeightMatrix& w, std::size_t j, std::span<const std::size_t> row_sample, std::size_t k,
                   std::span<const std::size_t> col_sample, std::size_t tau) {
    if (tau == 0 || row_sample.size() != tau || col_sample.size() != tau)
        throw config_error("construct_stochria: sample sets must have size tau >= 1");
    for (auto i : row_sample)
        if (i >= w.cols()) throw config_error("construct_stochria: row sample index out of range");
    for (auto i : col_sample)
        if (i >= w.rows()) throw config_error("construct_stochria: column sample index out of range");
    const double rn = pnorm(row_sample.size(), [&](std::size_t i) { return w(j, row_sample[i]); }, norm_order::l1);
    const double cn = pnorm(col_sample.size(), [&](std::size_t i) { return w(col_sample[i], k); }, norm_order::l1);
    if (!(rn > 0.0) || !(cn > 0.0)) throw config_error("construct_stochria: zero sampled norm");
    const double root_tau = std::sqrt(static_cast<double>(tau));
    std::vector<double> x(w.cols(), 0.0), y(w.rows(), 0.0);
    for (auto i : row_sample) x[i] = 1.0 / (rn * root_tau);
    for (auto i : col_sample) y[i] = 1.0 / (cn * root_tau);
    return {x, y};
}

inline VerificationOutcome verify_stochria_construction(std::size_t trials, std::size_t max_dim, std::uint64_t seed,
                                                        double tol = default_rel_tol) {
    detail::outcome_builder ob("stochria_construction", tol);
    for (std::size_t t = 0; t < trials; ++t) {
        auto eng = keyed_engine(seed, detail::stream_stoch, t);
        const std::size_t b = detail::draw_dim(eng, 1, max_dim), c = detail::draw_dim(eng, 1, max_dim);
        const Matrix w = random_normal_matrix(b, c, eng);
        const std::size_t tau = detail::draw_dim(eng, 1, std::min(b, c));
        const std::size_t j = uniform_below(eng, b), k = uniform_below(eng, c);
        const auto rs = sample_without_replacement(eng, c, tau);
        const auto cs = sample_without_replacement(eng, b, tau);
        const auto [x, y] = construct_stochria(w, j, rs, k, cs, tau);
        double rn = 0, cn = 0;
        for (auto i : rs) rn += std::fabs(w(j, i));
        for (auto i : cs) cn += std::fabs(w(i, k));
        ob.add(pnorm(x, norm_order::l2), 1.0 / rn);
        ob.add(pnorm(y, norm_order::l2), 1.0 / cn);
        ob.trial();
    }
    return ob.finish();
}

/// G_jk^2 = (||W_j:||_2^2 + ||W_:k||_2^2) / (b + c); checks ||G||_F == ||W||_F.
inline VerificationOutcome verify_g_identity(const WeightMatrix& w, double tol = default_rel_tol) {
    detail::outcome_builder ob("g_frobenius_identity", tol);
    const auto rn = row_pnorm(w, norm_order::l2);
    const auto cn = col_pnorm(w, norm_order::l2);
    const double denom = static_cast<double>(w.rows() + w.cols());
    long double g2 = 0;
    for (std::size_t j = 0; j < w.rows(); ++j)
        for (std::size_t k = 0; k < w.cols(); ++k) g2 += (rn[j] * rn[j] + cn[k] * cn[k]) / denom;
    ob.add(static_cast<double>(std::sqrt(g2)), frobenius(w));
    ob.trial();
    return ob.finish();
}

inline VerificationOutcome verify_g_identity_random(std::size_t trials, std::size_t max_dim, std::uint64_t seed,
                                                    double tol = default_rel_tol) {
    VerificationOutcome out{"g_frobenius_identity", 0, 0.0, tol, true};
    for (std::size_t t = 0; t < trials; ++t) {
        auto eng = keyed_engine(seed, detail::stream_gid, t);
        std::size_t b = detail::draw_dim(eng, 1, max_dim), c = detail::draw_dim(eng, 1, max_dim);
        if (b == c) c = c == max_dim ? c - (c > 1) : c + 1; // rectangular whenever possible
        const auto o = verify_g_identity(random_normal_matrix(b, c, eng), tol);
        out.max_deviation = std::max(out.max_deviation, o.max_deviation);
        ++out.trials;
    }
    out.passed = out.max_deviation <= tol;
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive search for small instances.

inline constexpr std::size_t brute_force_limit = 20;

struct BruteForceResult {
    SparsityMask mask;
    double g = 0.0;
    std::vector<std::size_t> pruned; // linear indices, ascending
};

/// Minimizes the symmetric objective over every mask pruning exactly k entries.
/// Ties go to the lexicographically smallest pruned index set.
inline BruteForceResult brute_force_prune(const Matrix& x, const Matrix& y, const WeightMatrix& w, std::size_t k) {
    const std::size_t n = w.size();
    if (n > brute_force_limit) throw config_error("brute_force_prune: b*c exceeds " + std::to_string(brute_force_limit));
    if (k > n) throw config_error("brute_force_prune: k exceeds the number of weights");
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    BruteForceResult best;
    bool have = false;
    for (;;) {
        WeightMatrix pruned = w;
        for (auto i : idx) pruned.values()[i] = 0.0;
        const double g = sym_objective(x, y, w, pruned).value;
        if (!have || g < best.g) {
            best.g = g;
            best.pruned = idx;
            have = true;
        }
        // next combination in lexicographic order
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t m = i; m < k; ++m) idx[m] = idx[m - 1] + 1;
    }
    best.mask = SparsityMask(w.rows(), w.cols(), true, PatternDescriptor::unstructured(
                                                           n ? static_cast<double>(k) / n : 0.0,
                                                           comparison_group::per_layer));
    for (auto i : best.pruned) best.mask.set(i, false);
    return best;
}

/// Linear index of the smallest score; ties go to the lower index.
inline std::size_t argmin_score(const ScoreMatrix& s) {
    std::size_t best = 0;
    const auto v = s.values();
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

struct OracleInstance {
    Matrix x, y, w;
};

/// Small random instance with 2 <= b <= 4, 2 <= c <= 5 (b*c <= 20).
inline OracleInstance random_oracle_instance(std::mt19937_64& eng) {
    const std::size_t b = detail::draw_dim(eng, 2, 4), c = detail::draw_dim(eng, 2, 5);
    return {random_normal_matrix(detail::draw_dim(eng, 1, 6), b, eng), random_normal_matrix(c, detail::draw_dim(eng, 1, 6), eng),
            random_normal_matrix(b, c, eng)};
}

/// k = 1: the brute-force minimizer must be the argmin of score_general_sym.
/// max_deviation counts disagreeing instances.
inline VerificationOutcome verify_oracle_agreement(std::size_t trials, std::uint64_t seed) {
    VerificationOutcome out{"oracle_k1_argmin_agreement", 0, 0.0, 0.0, true};
    for (std::size_t t = 0; t < trials; ++t) {
        auto eng = keyed_engine(seed, detail::stream_oracle, t);
        const auto inst = random_oracle_instance(eng);
        const auto bf = brute_force_prune(inst.x, inst.y, inst.w, 1);
        const auto s = score_general_sym(inst.w, col_pnorm(inst.x, norm_order::l2), row_pnorm(inst.y, norm_order::l2));
        if (bf.pruned.front() != argmin_score(s)) out.max_deviation += 1.0;
        ++out.trials;
    }
    out.passed = out.max_deviation == 0.0;
    return out;
}

/// Greedy score masks vs the exhaustive optimum for k > 1. Reported, not asserted.
struct GreedyGapReport {
    std::size_t instances = 0;
    std::size_t exact = 0;     // greedy objective equals the optimum
    double mean_relative_gap = 0.0;
    double max_relative_gap = 0.0;
};

inline GreedyGapReport greedy_gap(std::size_t trials, std::uint64_t seed) {
    GreedyGapReport rep;
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        auto eng = keyed_engine(seed, detail::stream_gap, t);
        const auto inst = random_oracle_instance(eng);
        const std::size_t n = inst.w.size();
        const std::size_t k = detail::draw_dim(eng, 2, n / 2);
        const auto s = score_general_sym(inst.w, col_pnorm(inst.x, norm_order::l2), row_pnorm(inst.y, norm_order::l2));
        const auto mask = build_unstructured_mask(s, static_cast<double>(k) / static_cast<double>(n));
        const double g_greedy = sym_objective(inst.x, inst.y, inst.w, apply_mask(inst.w, mask)).value;
        const double g_opt = brute_force_prune(inst.x, inst.y, inst.w, k).g;
        const double gap = g_opt > 0 ? (g_greedy - g_opt) / g_opt : 0.0;
        rep.exact += gap <= 1e-12;
        sum += gap;
        rep.max_relative_gap = std::max(rep.max_relative_gap, gap);
        ++rep.instances;
    }
    rep.mean_relative_gap = rep.instances ? sum / static_cast<double>(rep.instances) : 0.0;
    return rep;
}

/// StochRIA at beta = 1 on square W must equal score_ria bit for bit.
inline VerificationOutcome verify_stochria_full_support(std::size_t seeds, std::size_t dim, std::uint64_t seed) {
    VerificationOutcome out{"stochria_full_support_equals_ria", 0, 0.0, 0.0, true};
    auto eng = keyed_engine(seed, detail::stream_degeneracy, 0);
    const Matrix w = random_normal_matrix(dim, dim, eng);
    const auto stats = compute_stats(random_normal_matrix(4 * dim, dim, eng));
    const ScoreMatrix ria = score_ria(w, stats, 1.0);
    for (std::size_t s = 0; s < seeds; ++s) {
        const ScoreMatrix st = score_stochria(w, &stats, 1.0, 1.0, seed + s);
        if (!(st == ria)) out.max_deviation += 1.0;
        ++out.trials;
    }
    out.passed = out.max_deviation == 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic layers with outlier column stripes.

struct SyntheticLayer {
    WeightMatrix w; // b x c
    Matrix x;       // tokens x b
    Matrix y;       // c x d
};

/// W gets a handful of high-magnitude column stripes; X has heavy-tailed
/// per-feature scales; Y has per-row scales.
inline SyntheticLayer make_striped_layer(std::uint64_t seed, std::size_t b = 64, std::size_t c = 64,
                                         std::size_t tokens = 256, std::size_t d = 32) {
    auto eng = keyed_engine(seed, detail::stream_striped, 0);
    SyntheticLayer out{random_normal_matrix(b, c, eng), random_normal_matrix(tokens, b, eng),
                       random_normal_matrix(c, d, eng)};
    std::vector<double> col_scale(c, 1.0);
    for (std::size_t k = 0; k < c; ++k)
        if (uniform01(eng) < 0.125) col_scale[k] = uniform(eng, 4.0, 10.0);
    for (std::size_t j = 0; j < b; ++j)
        for (std::size_t k = 0; k < c; ++k) out.w(j, k) *= col_scale[k];
    for (std::size_t j = 0; j < b; ++j) {
        const double s = std::exp(normal(eng));
        const double shift = 0.5 * normal(eng);
        for (std::size_t t = 0; t < tokens; ++t) out.x(t, j) = s * (out.x(t, j) + shift);
    }
    for (std::size_t k = 0; k < c; ++k) {
        const double s = std::exp(0.5 * normal(eng));
        for (std::size_t l = 0; l < d; ++l) out.y(k, l) *= s;
    }
    return out;
}

/// Mask pruning floor(eps * size) uniformly random entries.
inline SparsityMask random_mask(std::size_t rows, std::size_t cols, double eps, std::mt19937_64& eng) {
    SparsityMask m(rows, cols, true, PatternDescriptor::unstructured(eps, comparison_group::per_layer));
    for (auto i : sample_without_replacement(eng, rows * cols, pruned_count(eps, rows * cols))) m.set(i, false);
    return m;
}

struct HeuristicReport {
    std::size_t instances = 0;
    std::size_t wins = 0; // score mask strictly better than random
    std::vector<double> g_score;
    std::vector<double> g_random;
};

/// general_sym-score masks against random masks of equal density.
inline HeuristicReport heuristic_vs_random(std::size_t instances, std::uint64_t seed, double eps = 0.5) {
    HeuristicReport rep;
    for (std::size_t t = 0; t < instances; ++t) {
        const auto layer = make_striped_layer(seed + t);
        const auto stats = compute_stats(layer.x);
        const auto s = score_general_sym(layer.w, stats.col_l2, row_pnorm(layer.y, norm_order::l2));
        const auto mask = build_unstructured_mask(s, eps);
        auto eng = keyed_engine(seed + t, detail::stream_striped, 1);
        const auto rmask = random_mask(layer.w.rows(), layer.w.cols(), eps, eng);
        const double gs = sym_objective(layer.x, layer.y, layer.w, apply_mask(layer.w, mask)).value;
        const double gr = sym_objective(layer.x, layer.y, layer.w, apply_mask(layer.w, rmask)).value;
        rep.g_score.push_back(gs);
        rep.g_random.push_back(gr);
        rep.wins += gs < gr;
        ++rep.instances;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Suites used by the `verify` command.

inline std::vector<VerificationOutcome> run_lemma_suite(std::size_t trials, std::uint64_t seed) {
    return {
        verify_lemma1(trials, 8, seed),
        verify_thm2(trials, 8, seed),
        verify_ria(trials, 8, seed),
        verify_general_diag(trials, 8, seed),
        verify_lp(lp_mode::weight_proportional, trials, 8, seed),
        verify_lp(lp_mode::unit_vector, trials, 8, seed),
        verify_stochria_construction(trials, 8, seed),
        verify_g_identity_random(trials, 8, seed),
    };
}

inline std::vector<VerificationOutcome> run_oracle_suite(std::size_t trials, std::uint64_t seed) {
    return {
        verify_oracle_agreement(trials, seed),
        verify_stochria_full_support(std::max<std::size_t>(1, std::min<std::size_t>(trials, 50)), 12, seed),
    };
}

} // namespace symprune
