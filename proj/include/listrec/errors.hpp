#ifndef LISTREC_ERRORS_HPP
#define LISTREC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace listrec {

// Error taxonomy mirrored by the CLI exit codes: usage 1, data 2, numeric 3.

// Caller broke a contract: bad argument, invalid config, index out of range.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input data is unreadable, malformed or degenerate.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computation produced a non-finite value.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum ExitCode {
    exit_ok = 0,
    exit_usage = 1,
    exit_data = 2,
    exit_numeric = 3,
    exit_partial_sweep = 4,
};

} // namespace listrec

#endif // LISTREC_ERRORS_HPP
