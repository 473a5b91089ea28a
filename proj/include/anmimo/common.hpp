#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace anmimo {

inline constexpr const char* kVersion = "0.1.0";

// All public rates are bits; internal Gamma-function work is in nats.
inline constexpr double kLog2E = 1.4426950408889634074;

// Carrier for every Monte Carlo result: the estimate is meaningless
// without its uncertainty and provenance.
struct MCEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace anmimo
