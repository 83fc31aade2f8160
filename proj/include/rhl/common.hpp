#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace rhl {

// Argument and precondition violations. The CLI maps these to exit code 2.
struct argument_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Resource limits (tensor caps, unsupported numeric ranges). Exit code 2.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Internal numeric failures (eigensolve breakdown, invariant violations).
struct numeric_error : resource_error {
    using resource_error::resource_error;
};

// File and stream problems. Exit code 3.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A sampling or search budget ran out. Exit code 4.
struct budget_error : std::runtime_error {
    std::size_t achieved = 0;
    budget_error(const std::string& msg, std::size_t got)
        : std::runtime_error(msg), achieved(got) {}
};

// The band acceptance probability is below the supported floor.
struct band_error : resource_error {
    using resource_error::resource_error;
};

// A feasibility solve did not converge. Carries the residual report. Exit code 5.
struct infeasible_error : std::runtime_error {
    double max_residual = 0.0;
    double box_violation = 0.0;
    infeasible_error(const std::string& msg, double res, double box)
        : std::runtime_error(msg), max_residual(res), box_violation(box) {}
};

// Report formatting: 9 significant digits everywhere a number leaves the library.
inline std::string fmt_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// Round-trip-exact formatting for sample exports.
inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace rhl
