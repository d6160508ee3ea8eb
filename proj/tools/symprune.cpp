// SPDX-License-Identifier: Apache-2.0
//
// symprune: command-line front end for scoring, masking, objective
// evaluation, prune-and-grow fine-tuning, identity verification and ablation
// sweeps.
//
// Exit codes: 0 ok, 1 verification failure, 2 format error, 3 config error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "symprune/symprune.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace symprune;

namespace {

constexpr const char* tool_version = "1.0.0";

enum exit_code : int { exit_ok = 0, exit_verify = 1, exit_format = 2, exit_config = 3 };

std::string sha256_hex(std::span<const std::uint8_t> data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// One per run. Written next to the primary output (<out>.manifest.json), to
/// --manifest when given, or to stderr otherwise.
class RunManifest {
public:
    explicit RunManifest(std::string command) : start_(std::chrono::steady_clock::now()) {
        doc_["schema"] = 1;
        doc_["command"] = std::move(command);
        doc_["tool_version"] = tool_version;
        doc_["config"] = json::object();
        doc_["inputs"] = json::object();
        doc_["outputs"] = json::array();
    }

    json& config() { return doc_["config"]; }
    void seed(std::uint64_t s) { doc_["seed"] = s; }

    bytes read_input(const std::string& role, const std::string& path) {
        bytes data = read_file(path);
        doc_["inputs"][role] = {{"path", path}, {"sha256", sha256_hex(data)}};
        return data;
    }

    void output(const std::string& path) { doc_["outputs"].push_back(path); }

    void emit(const std::string& path) {
        const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        doc_["wall_clock_seconds"] = elapsed;
        const std::string text = doc_.dump(2) + "\n";
        if (path.empty()) {
            std::cerr << "manifest: " << doc_.dump() << "\n";
            return;
        }
        write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    }

private:
    json doc_;
    std::chrono::steady_clock::time_point start_;
};

std::string manifest_path(const std::string& explicit_path, const std::string& out) {
    if (!explicit_path.empty()) return explicit_path;
    return out.empty() ? std::string() : out + ".manifest.json";
}

void write_text(const std::string& path, const std::string& text) {
    write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

unsigned thread_cap() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SYMPRUNE_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
        } catch (const std::exception&) {
            throw config_error("SYMPRUNE_THREADS must be a positive integer");
        }
    }
    return n;
}

std::pair<unsigned, unsigned> parse_pattern(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw config_error("pattern must look like N:M");
    try {
        std::size_t used = 0;
        const int n = std::stoi(s.substr(0, colon), &used);
        if (used != colon) throw config_error("bad N in pattern");
        const std::string ms = s.substr(colon + 1);
        const int m = std::stoi(ms, &used);
        if (used != ms.size()) throw config_error("bad M in pattern");
        if (n <= 0 || m <= 0 || n > m || m > 255) throw config_error("pattern requires 0 < N <= M <= 255");
        return {static_cast<unsigned>(n), static_cast<unsigned>(m)};
    } catch (const std::logic_error&) {
        throw config_error("pattern must look like N:M, got '" + s + "'");
    }
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    if (out.empty()) throw config_error("empty list '" + s + "'");
    return out;
}

double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw config_error("bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw config_error("bad number '" + s + "'");
    }
}

std::uint64_t parse_u64(const std::string& s) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size() || s.front() == '-') throw config_error("bad integer '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw config_error("bad integer '" + s + "'");
    }
}

json stats_summary(const ScoreMatrix& s) {
    double lo = 0, hi = 0;
    long double sum = 0;
    if (s.size()) lo = hi = s.values()[0];
    for (double v : s.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
    }
    return {{"min", lo}, {"mean", s.size() ? static_cast<double>(sum / s.size()) : 0.0}, {"max", hi}};
}

json score_config_json(const ScoreConfig& c) {
    return {{"method", to_string(c.method)}, {"alpha", c.alpha},      {"p", to_string(c.p)},
            {"beta", c.beta},                {"seed", c.seed},        {"trials", c.trials},
            {"strategy", to_string(c.strategy)}, {"symmetric_variant", to_string(c.variant)}};
}

// ---------------------------------------------------------------------------

struct PruneOptions {
    std::string weights, stats, y, out, scores_out, manifest;
    std::string method = "ria", p = "1", strategy = "S1", variant = "root_sum_square";
    double alpha = 0.5, beta = 0.1;
    std::uint64_t seed = 0;
    unsigned trials = 1;
    std::optional<double> sparsity;
    std::string pattern;
    std::string group = "per_layer", axis = "input_dim";
};

int cmd_prune(const PruneOptions& o) {
    RunManifest man("prune");
    ScoreConfig cfg;
    cfg.method = parse_score_method(o.method);
    cfg.alpha = o.alpha;
    cfg.p = parse_norm_order(o.p);
    cfg.beta = o.beta;
    cfg.seed = o.seed;
    cfg.trials = o.trials;
    cfg.strategy = parse_score_strategy(o.strategy);
    cfg.variant = parse_symmetric_variant(o.variant);
    validate(cfg);
    if (o.sparsity && !o.pattern.empty()) throw config_error("--sparsity and --pattern are mutually exclusive");
    const double eps = o.sparsity.value_or(0.5);
    const auto group = parse_comparison_group(o.group);
    const auto axis = parse_nm_axis(o.axis);
    std::optional<std::pair<unsigned, unsigned>> nm;
    if (!o.pattern.empty()) nm = parse_pattern(o.pattern);
    if (requires_stats(cfg) && o.stats.empty())
        throw config_error("method " + o.method + " requires --stats");
    if (requires_output_norms(cfg) && o.y.empty()) throw config_error("method owanda requires --y");

    const Matrix w = decode_symw(man.read_input("weights", o.weights));
    std::optional<ActivationStats> stats;
    if (!o.stats.empty()) stats = load_stats(man.read_input("stats", o.stats));
    std::vector<double> y_norms;
    if (!o.y.empty()) {
        const Matrix y = decode_symw(man.read_input("y", o.y));
        if (y.rows() != w.cols()) throw shape_error("--y must have one row per column of W");
        y_norms = row_pnorm(y, norm_order::l2);
    }

    ScoreInputs in;
    if (stats) in.stats = &*stats;
    in.y_row_norms = y_norms;
    const ScoreMatrix scores = compute_scores(w, cfg, in);
    const SparsityMask mask = nm ? build_nm_mask(scores, nm->first, nm->second, axis)
                                 : build_unstructured_mask(scores, eps, group);
    save_symm(o.out, mask);
    man.output(o.out);
    if (!o.scores_out.empty()) {
        save_symw(o.scores_out, scores);
        man.output(o.scores_out);
    }

    auto& c = man.config();
    c["score"] = score_config_json(cfg);
    if (nm) {
        c["pattern"] = {{"kind", "n_m"}, {"n", nm->first}, {"m", nm->second}, {"axis", to_string(axis)}};
    } else {
        c["pattern"] = {{"kind", "unstructured"}, {"sparsity", eps}, {"group", to_string(group)}};
    }
    man.seed(cfg.seed);

    const auto summary = stats_summary(scores);
    std::cout << "density=" << num(mask_density(mask)) << "\n"
              << "kept=" << mask.count_kept() << " total=" << mask.size() << "\n"
              << "score_min=" << num(summary["min"]) << " score_mean=" << num(summary["mean"])
              << " score_max=" << num(summary["max"]) << "\n";
    man.emit(manifest_path(o.manifest, o.out));
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct EvalOptions {
    std::string weights, mask, pruned, x, y, objective = "sym", json_out, manifest;
};

int cmd_eval(const EvalOptions& o) {
    RunManifest man("eval");
    const auto kind = parse_objective(o.objective);
    if (o.mask.empty() == o.pruned.empty()) throw config_error("give exactly one of --mask or --pruned");
    const Matrix w = decode_symw(man.read_input("weights", o.weights));
    Matrix pruned;
    if (!o.mask.empty()) {
        pruned = apply_mask(w, decode_symm(man.read_input("mask", o.mask)));
    } else {
        pruned = decode_symw(man.read_input("pruned", o.pruned));
        if (!pruned.same_shape(w)) throw shape_error("--pruned must match the shape of --weights");
    }
    Matrix x, y;
    if (!o.x.empty()) {
        x = decode_symw(man.read_input("x", o.x));
    } else {
        std::cerr << "warning: no --x given; input term is 0\n";
        x = Matrix(1, w.rows());
    }
    if (!o.y.empty()) {
        y = decode_symw(man.read_input("y", o.y));
    } else {
        if (kind != objective_kind::inprecon) std::cerr << "warning: no --y given; output term is 0\n";
        y = Matrix(w.cols(), 1);
    }
    const ObjectiveReport rep = evaluate_objective(kind, x, y, w, pruned);
    const json j = {{"schema", 1},
                    {"objective", to_string(rep.kind)},
                    {"value", rep.value},
                    {"input_term", rep.input_term},
                    {"output_term", rep.output_term}};
    std::cout << "objective=" << to_string(rep.kind) << "\n"
              << "value=" << num(rep.value) << "\n"
              << "input_term=" << num(rep.input_term) << "\n"
              << "output_term=" << num(rep.output_term) << "\n"
              << j.dump() << "\n";
    if (!o.json_out.empty()) {
        write_text(o.json_out, j.dump(2) + "\n");
        man.output(o.json_out);
    }
    man.config() = {{"objective", to_string(kind)}};
    man.emit(manifest_path(o.manifest, o.json_out));
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct FinetuneOptions {
    std::string weights, mask, stats, out, report, manifest;
    std::string variant = "r2", reg_p = "2";
    unsigned max_cycles = 50;
    double threshold = 0.1, gamma1 = 0.0, gamma2 = 0.001, alpha = 0.5, variance_floor = 1e-12;
    bool relative_grow = false, relative_prune = true;
};

json report_json(const FinetuneReport& r) {
    json hist = json::object();
    for (const auto& [cycles, count] : r.cycles_histogram) hist[std::to_string(cycles)] = count;
    std::size_t swaps = 0;
    for (auto c : r.cycles) swaps += c;
    return {{"schema", 1},
            {"rows", r.rows},
            {"total_swaps", swaps},
            {"cycles_histogram", hist},
            {"sum_abs_expected_error_before", r.sum_abs_expected_error_before},
            {"sum_abs_expected_error_after", r.sum_abs_expected_error_after},
            {"row_regularizer_sum_after", r.row_regularizer_sum_after},
            {"warnings", r.warnings}};
}

int cmd_finetune(const FinetuneOptions& o) {
    RunManifest man("finetune");
    DsnotConfig cfg;
    cfg.variant = parse_dsnot_variant(o.variant);
    cfg.max_cycles = o.max_cycles;
    cfg.update_threshold = o.threshold;
    cfg.gamma1 = o.gamma1;
    cfg.gamma2 = o.gamma2;
    cfg.reg_p = parse_norm_order(o.reg_p);
    cfg.alpha = o.alpha;
    cfg.relative_grow = o.relative_grow;
    cfg.relative_prune = o.relative_prune;
    cfg.variance_floor = o.variance_floor;
    validate(cfg);

    const Matrix w = decode_symw(man.read_input("weights", o.weights));
    const SparsityMask mask = decode_symm(man.read_input("mask", o.mask));
    const ActivationStats stats = load_stats(man.read_input("stats", o.stats));
    const auto result = finetune(w, mask, stats, cfg);
    for (const auto& warn : result.report.warnings) std::cerr << "warning: " << warn << "\n";
    save_symm(o.out, result.mask);
    man.output(o.out);

    const json rep = report_json(result.report);
    if (!o.report.empty()) {
        write_text(o.report, rep.dump(2) + "\n");
        man.output(o.report);
    }
    std::cout << "density_before=" << num(mask_density(mask)) << "\n"
              << "density_after=" << num(mask_density(result.mask)) << "\n"
              << rep.dump() << "\n";

    man.config() = {{"variant", to_string(cfg.variant)},
                    {"max_cycles", cfg.max_cycles},
                    {"update_threshold", cfg.update_threshold},
                    {"gamma1", cfg.gamma1},
                    {"gamma2", cfg.gamma2},
                    {"reg_p", to_string(cfg.reg_p)},
                    {"alpha", cfg.alpha},
                    {"relative_grow", cfg.relative_grow},
                    {"relative_prune", cfg.relative_prune},
                    {"variance_floor", cfg.variance_floor}};
    man.emit(manifest_path(o.manifest, o.out));
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
    std::string suite = "all", manifest;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
};

int cmd_verify(const VerifyOptions& o) {
    RunManifest man("verify");
    if (o.suite != "lemmas" && o.suite != "oracle" && o.suite != "all")
        throw config_error("unknown suite '" + o.suite + "' (expected lemmas, oracle or all)");
    std::vector<VerificationOutcome> outcomes;
    if (o.suite == "lemmas" || o.suite == "all") {
        auto v = run_lemma_suite(o.trials, o.seed);
        outcomes.insert(outcomes.end(), v.begin(), v.end());
    }
    std::optional<GreedyGapReport> gap;
    if (o.suite == "oracle" || o.suite == "all") {
        auto v = run_oracle_suite(std::min<std::size_t>(o.trials, 200), o.seed);
        outcomes.insert(outcomes.end(), v.begin(), v.end());
        gap = greedy_gap(std::min<std::size_t>(o.trials, 50), o.seed);
    }
    bool all = true;
    for (const auto& r : outcomes) {
        char line[256];
        std::snprintf(line, sizeof line, "%-36s trials=%-6zu max_dev=%-12.3e tol=%-8.1e %s", r.name.c_str(), r.trials,
                      r.max_deviation, r.tolerance, r.passed ? "PASS" : "FAIL");
        std::cout << line << "\n";
        all = all && r.passed;
    }
    if (gap)
        std::cout << "info greedy_vs_bruteforce instances=" << gap->instances << " exact=" << gap->exact
                  << " mean_rel_gap=" << num(gap->mean_relative_gap) << " max_rel_gap=" << num(gap->max_relative_gap)
                  << "\n";
    man.config() = {{"suite", o.suite}, {"trials", o.trials}};
    man.seed(o.seed);
    man.emit(o.manifest);
    return all ? exit_ok : exit_verify;
}

// ---------------------------------------------------------------------------

struct SweepOptions {
    std::string weights, stats, x, y, out, manifest;
    std::string methods = "magnitude,wanda,ria", alphas = "0.5", ps = "1", betas = "0.1", sparsities = "0.5",
                seeds = "0";
    std::string group = "per_layer";
};

struct SweepCell {
    ScoreConfig cfg;
    double sparsity = 0.5;
};

int cmd_sweep(const SweepOptions& o) {
    RunManifest man("sweep");
    std::vector<score_method> methods;
    for (const auto& m : split_list(o.methods)) methods.push_back(parse_score_method(m));
    std::vector<double> alphas, betas, sparsities;
    for (const auto& a : split_list(o.alphas)) alphas.push_back(parse_double(a));
    for (const auto& b : split_list(o.betas)) betas.push_back(parse_double(b));
    for (const auto& s : split_list(o.sparsities)) sparsities.push_back(parse_double(s));
    std::vector<norm_order> ps;
    for (const auto& p : split_list(o.ps)) ps.push_back(parse_norm_order(p));
    std::vector<std::uint64_t> seeds;
    for (const auto& s : split_list(o.seeds)) seeds.push_back(parse_u64(s));
    const auto group = parse_comparison_group(o.group);

    std::vector<SweepCell> cells;
    for (auto m : methods)
        for (double a : alphas)
            for (auto p : ps)
                for (double b : betas)
                    for (double s : sparsities)
                        for (auto seed : seeds) {
                            SweepCell cell;
                            cell.cfg.method = m;
                            cell.cfg.alpha = a;
                            cell.cfg.p = p;
                            cell.cfg.beta = b;
                            cell.cfg.seed = seed;
                            cell.sparsity = s;
                            validate(cell.cfg);
                            if (!(s >= 0.0 && s < 1.0)) throw config_error("sparsity must lie in [0, 1)");
                            if (requires_output_norms(cell.cfg) && o.y.empty())
                                throw config_error("method owanda requires --y");
                            cells.push_back(cell);
                        }

    const Matrix w = decode_symw(man.read_input("weights", o.weights));
    const Matrix x = decode_symw(man.read_input("x", o.x));
    if (x.cols() != w.rows()) throw shape_error("--x must have one column per row of W");
    Matrix y(w.cols(), 1);
    std::vector<double> y_norms;
    if (!o.y.empty()) {
        y = decode_symw(man.read_input("y", o.y));
        if (y.rows() != w.cols()) throw shape_error("--y must have one row per column of W");
        y_norms = row_pnorm(y, norm_order::l2);
    }
    const ActivationStats stats = o.stats.empty() ? compute_stats(x) : load_stats(man.read_input("stats", o.stats));

    struct Row {
        double g = 0, g2 = 0, inp = 0, density = 0;
        std::string error;
    };
    std::vector<Row> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                ScoreInputs in{&stats, y_norms};
                const auto scores = compute_scores(w, cells[i].cfg, in);
                const auto mask = build_unstructured_mask(scores, cells[i].sparsity, group);
                const auto pruned = apply_mask(w, mask);
                rows[i].g = sym_objective(x, y, w, pruned).value;
                rows[i].g2 = sym_objective_squared(x, y, w, pruned).value;
                rows[i].inp = inprecon(x, w, pruned);
                rows[i].density = mask_density(mask);
            } catch (const std::exception& e) {
                rows[i].error = e.what();
            }
        }
    };
    const unsigned n_threads = std::min<std::size_t>(thread_cap(), std::max<std::size_t>(1, cells.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& r : rows)
        if (!r.error.empty()) throw config_error("sweep cell failed: " + r.error);

    std::string csv = "method,alpha,p,beta,sparsity,seed,g,g_squared,inprecon,density\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        csv += to_string(c.cfg.method) + "," + num(c.cfg.alpha) + "," + to_string(c.cfg.p) + "," + num(c.cfg.beta) +
               "," + num(c.sparsity) + "," + std::to_string(c.cfg.seed) + "," + num(rows[i].g) + "," +
               num(rows[i].g2) + "," + num(rows[i].inp) + "," + num(rows[i].density) + "\n";
    }
    write_text(o.out, csv);
    man.output(o.out);
    std::cout << "rows=" << cells.size() << "\n";
    man.config() = {{"methods", o.methods}, {"alphas", o.alphas}, {"ps", o.ps},       {"betas", o.betas},
                    {"sparsities", o.sparsities}, {"seeds", o.seeds}, {"group", o.group}};
    man.emit(manifest_path(o.manifest, o.out));
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct StatsOptions {
    std::vector<std::string> tokens;
    std::string out, manifest;
};

int cmd_stats(const StatsOptions& o) {
    RunManifest man("stats");
    std::optional<ActivationStats> acc;
    for (std::size_t i = 0; i < o.tokens.size(); ++i) {
        const Matrix x = decode_symw(man.read_input("tokens_" + std::to_string(i), o.tokens[i]));
        const auto s = compute_stats(x);
        acc = acc ? merge_stats(*acc, s) : s;
    }
    save_stats_file(o.out, *acc);
    man.output(o.out);
    std::cout << "features=" << acc->feature_count << " tokens=" << acc->token_count << "\n";
    man.emit(manifest_path(o.manifest, o.out));
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"symprune: post-training pruning scores, masks, objectives and DSnoT fine-tuning"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    PruneOptions po;
    auto* prune = app.add_subcommand("prune", "score weights and write a sparsity mask");
    prune->add_option("--weights", po.weights, "SYMW weight matrix (inputs x outputs)")->required();
    prune->add_option("--stats", po.stats, "SYMA activation statistics");
    prune->add_option("--y", po.y, "SYMW output calibration matrix (outputs x d)");
    prune->add_option("--method", po.method, "magnitude|wanda|owanda|symmetric|general_sym|lp|ria|stochria|strategy")
        ->capture_default_str();
    prune->add_option("--alpha", po.alpha, "activation exponent")->capture_default_str();
    prune->add_option("--p", po.p, "norm order 0|1|2|3|4|inf")->capture_default_str();
    prune->add_option("--beta", po.beta, "StochRIA sampling ratio")->capture_default_str();
    prune->add_option("--seed", po.seed, "StochRIA seed")->capture_default_str();
    prune->add_option("--trials", po.trials, "StochRIA seeds averaged")->capture_default_str();
    prune->add_option("--strategy", po.strategy, "S1|S2|S3|S4")->capture_default_str();
    prune->add_option("--variant", po.variant, "symmetric score: sum_norm|root_sum_square")->capture_default_str();
    prune->add_option("--sparsity", po.sparsity, "unstructured sparsity in [0,1), default 0.5");
    prune->add_option("--pattern", po.pattern, "N:M pattern, e.g. 2:4");
    prune->add_option("--group", po.group, "per_layer|per_row|per_column")->capture_default_str();
    prune->add_option("--axis", po.axis, "N:M axis input_dim|output_dim")->capture_default_str();
    prune->add_option("--out", po.out, "output SYMM mask")->required();
    prune->add_option("--scores-out", po.scores_out, "optional SYMW dump of the score matrix");
    prune->add_option("--manifest", po.manifest, "manifest path (default <out>.manifest.json)");

    EvalOptions eo;
    auto* eval = app.add_subcommand("eval", "evaluate a reconstruction objective");
    eval->add_option("--weights", eo.weights)->required();
    eval->add_option("--mask", eo.mask, "SYMM mask applied to --weights");
    eval->add_option("--pruned", eo.pruned, "SYMW pruned weights");
    eval->add_option("--x", eo.x, "SYMW input calibration (tokens x inputs)");
    eval->add_option("--y", eo.y, "SYMW output calibration (outputs x d)");
    eval->add_option("--objective", eo.objective, "inprecon|sym|sym_squared")->capture_default_str();
    eval->add_option("--json", eo.json_out, "write the JSON report here");
    eval->add_option("--manifest", eo.manifest);

    FinetuneOptions fo;
    auto* ft = app.add_subcommand("finetune", "training-free prune-and-grow fine-tuning of a mask");
    ft->add_option("--weights", fo.weights)->required();
    ft->add_option("--mask", fo.mask)->required();
    ft->add_option("--stats", fo.stats)->required();
    ft->add_option("--out", fo.out, "output SYMM mask")->required();
    ft->add_option("--report", fo.report, "write the JSON report here");
    ft->add_option("--variant", fo.variant, "vanilla|r2")->capture_default_str();
    ft->add_option("--max-cycles", fo.max_cycles)->capture_default_str();
    ft->add_option("--threshold", fo.threshold, "stop when |E[eps]| falls below")->capture_default_str();
    ft->add_option("--gamma1", fo.gamma1)->capture_default_str();
    ft->add_option("--gamma2", fo.gamma2)->capture_default_str();
    ft->add_option("--reg-p", fo.reg_p, "regularizer norm order")->capture_default_str();
    ft->add_option("--alpha", fo.alpha)->capture_default_str();
    ft->add_option("--relative-grow", fo.relative_grow, "on|off")->capture_default_str();
    ft->add_option("--relative-prune", fo.relative_prune, "on|off")->capture_default_str();
    ft->add_option("--variance-floor", fo.variance_floor)->capture_default_str();
    ft->add_option("--manifest", fo.manifest);

    VerifyOptions vo;
    auto* verify = app.add_subcommand("verify", "numerically verify the score identities");
    verify->add_option("--suite", vo.suite, "lemmas|oracle|all")->capture_default_str();
    verify->add_option("--trials", vo.trials)->capture_default_str();
    verify->add_option("--seed", vo.seed)->capture_default_str();
    verify->add_option("--manifest", vo.manifest);

    SweepOptions so;
    auto* sweep = app.add_subcommand("sweep", "objective values over a method x alpha x p x beta x sparsity grid");
    sweep->add_option("--weights", so.weights)->required();
    sweep->add_option("--x", so.x, "SYMW input calibration (tokens x inputs)")->required();
    sweep->add_option("--y", so.y, "SYMW output calibration");
    sweep->add_option("--stats", so.stats, "SYMA stats for scoring (default: computed from --x)");
    sweep->add_option("--methods", so.methods)->capture_default_str();
    sweep->add_option("--alphas", so.alphas)->capture_default_str();
    sweep->add_option("--ps", so.ps)->capture_default_str();
    sweep->add_option("--betas", so.betas)->capture_default_str();
    sweep->add_option("--sparsities", so.sparsities)->capture_default_str();
    sweep->add_option("--seeds", so.seeds)->capture_default_str();
    sweep->add_option("--group", so.group)->capture_default_str();
    sweep->add_option("--out", so.out, "CSV output")->required();
    sweep->add_option("--manifest", so.manifest);

    StatsOptions sto;
    auto* stats = app.add_subcommand("stats", "compute SYMA statistics from SYMW token matrices");
    stats->add_option("--tokens", sto.tokens, "SYMW tokens x features; several files are merged in order")
        ->required();
    stats->add_option("--out", sto.out)->required();
    stats->add_option("--manifest", sto.manifest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try {
        if (*prune) return cmd_prune(po);
        if (*eval) return cmd_eval(eo);
        if (*ft) return cmd_finetune(fo);
        if (*verify) return cmd_verify(vo);
        if (*sweep) return cmd_sweep(so);
        if (*stats) return cmd_stats(sto);
    } catch (const format_error& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return exit_format;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_format;
    }
    return exit_config;
}
