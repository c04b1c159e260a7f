#pragma once

#include <stdexcept>
#include <string>

namespace botamp {

// Bad flags, bad config values, or referenced input files that do not exist.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Data that fails a contract: malformed rows, duplicate keys, empty inputs,
// out-of-range values.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failures on files we already committed to (unwritable
// checkpoint, mid-write errors).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite loss or similar numeric breakdown inside a solver.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace botamp
