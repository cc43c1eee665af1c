#ifndef DCACRN_ERROR_HPP
#define DCACRN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace dcacrn {

/// Invalid configuration, shape mismatch, or API misuse. Maps to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unreadable, malformed, or inconsistent input data. Maps to exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite values or numeric divergence. Maps to exit code 4.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dcacrn

#endif // DCACRN_ERROR_HPP
