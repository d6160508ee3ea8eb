// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "oracles.hpp"
#include "symprune/symprune.hpp"

namespace testing_support {

inline oracle::Grid to_grid(const symprune::Matrix& m) {
    oracle::Grid g = oracle::grid(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
    return g;
}

inline double rel(double got, double ref) { return std::fabs(got - ref) / std::max(std::fabs(ref), 1e-300); }

inline symprune::Matrix random_matrix(std::mt19937_64& eng, std::size_t r, std::size_t c, double lo = -1.0,
                                      double hi = 1.0) {
    return symprune::random_uniform_matrix(r, c, eng, lo, hi);
}

// Fresh empty directory under the system temp dir, unique per name.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("symprune_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct RunResult {
    int code = -1;
    std::string out;
};

// Runs a shell command, capturing stdout; stderr goes to err_path when given.
inline RunResult run(const std::string& cmd, const std::filesystem::path& err_path = {}) {
    const std::string full = cmd + (err_path.empty() ? " 2>/dev/null" : " 2>" + err_path.string());
    RunResult r;
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

} // namespace testing_support
