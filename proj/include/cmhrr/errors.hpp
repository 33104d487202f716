#pragma once

#include <stdexcept>
#include <string>

namespace cmhrr {

// Error taxonomy mirrored by the CLI exit codes:
//   ValidationError -> 2 (malformed input, schema or range violations)
//   NumericError    -> 3 (degenerate statistics: zero MH sums, degenerate
//                         quantiles, infeasible probabilities)
//   ConfigError     -> 4 (bad flags, missing files, inconsistent options)

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cmhrr
