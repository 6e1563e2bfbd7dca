#pragma once

#include <stdexcept>
#include <string>

namespace modhyst {

// File could not be opened/written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed trace/config file. Carries the 1-based line number when known.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, long line_no = -1)
        : std::runtime_error(line_no >= 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
          line(line_no) {}
    long line;
};

// Parameter estimation from raw samples failed (e.g. too few folds).
struct EstimationError : std::runtime_error {
    explicit EstimationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A trace cannot be unfolded (e.g. no anchor region for the low-rate sweep).
struct RecoveryError : std::runtime_error {
    explicit RecoveryError(const std::string& msg) : std::runtime_error(msg) {}
};

// A detected cluster carries no usable sign information.
struct DegenerateClusterError : RecoveryError {
    explicit DegenerateClusterError(const std::string& msg) : RecoveryError(msg) {}
};

}  // namespace modhyst
