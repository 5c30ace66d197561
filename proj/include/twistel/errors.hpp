#pragma once

#include <stdexcept>
#include <string>

namespace twistel {

// Precondition violations (bad arguments, size mismatches) are invalid_argument;
// runtime failures of the numerics get their own types so callers can react.

struct SizeMismatch : std::invalid_argument {
    explicit SizeMismatch(const std::string& what) : std::invalid_argument("size-mismatch: " + what) {}
};

struct AxisSingularity : std::runtime_error {
    explicit AxisSingularity(const std::string& what) : std::runtime_error("axis-singularity: " + what) {}
};

struct DegenerateFrame : std::runtime_error {
    explicit DegenerateFrame(const std::string& what) : std::runtime_error("degenerate-frame: " + what) {}
};

struct TangencyViolation : std::runtime_error {
    explicit TangencyViolation(const std::string& what) : std::runtime_error("tangency-violation: " + what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error("no-convergence: " + what) {}
};

struct UnitNormViolation : std::runtime_error {
    explicit UnitNormViolation(const std::string& what) : std::runtime_error("unit-norm-violation: " + what) {}
};

struct StabilityFailure : std::runtime_error {
    explicit StabilityFailure(const std::string& what) : std::runtime_error("stability-failure: " + what) {}
};

struct NanDetected : std::runtime_error {
    explicit NanDetected(const std::string& what) : std::runtime_error("nan-detected: " + what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace twistel
