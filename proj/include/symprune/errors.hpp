// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace symprune {

/// Malformed or truncated file payload (bad magic, dtype, size).
struct format_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inconsistent shapes between operands.
struct shape_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Invalid or conflicting configuration values.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace symprune
