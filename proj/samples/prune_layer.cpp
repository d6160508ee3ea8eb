// SPDX-License-Identifier: Apache-2.0
//
// Prunes a synthetic 64x64 layer to 50% sparsity with a few scores, then
// fine-tunes the RIA mask and prints the symmetric objective for each.

#include <cstdio>

#include "symprune/symprune.hpp"

using namespace symprune;

int main() {
    const SyntheticLayer layer = make_striped_layer(7);
    const ActivationStats stats = compute_stats(layer.x);
    const auto y_norms = row_pnorm(layer.y, norm_order::l2);

    const score_method methods[] = {score_method::magnitude, score_method::wanda, score_method::owanda,
                                    score_method::ria, score_method::stochria};
    SparsityMask ria_mask;
    for (auto m : methods) {
        ScoreConfig cfg;
        cfg.method = m;
        const auto scores = compute_scores(layer.w, cfg, ScoreInputs{&stats, y_norms});
        const auto mask = build_unstructured_mask(scores, 0.5);
        const auto g = sym_objective(layer.x, layer.y, layer.w, apply_mask(layer.w, mask));
        std::printf("%-10s g=%.6f (input %.6f, output %.6f)\n", to_string(m).c_str(), g.value, g.input_term,
                    g.output_term);
        if (m == score_method::ria) ria_mask = mask;
    }

    const auto tuned = finetune(layer.w, ria_mask, stats, DsnotConfig{});
    const auto g = sym_objective(layer.x, layer.y, layer.w, apply_mask(layer.w, tuned.mask));
    std::size_t swaps = 0;
    for (auto c : tuned.report.cycles) swaps += c;
    std::printf("ria+dsnot  g=%.6f after %zu swaps, sum|E| %.6f -> %.6f\n", g.value, swaps,
                tuned.report.sum_abs_expected_error_before, tuned.report.sum_abs_expected_error_after);
}
