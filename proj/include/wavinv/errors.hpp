#pragma once

#include <stdexcept>
#include <string>

namespace wavinv {

// Error taxonomy mirrored by the CLI exit codes (2..6).
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

struct ResonanceError : std::runtime_error {
    explicit ResonanceError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct IllConditionedError : std::runtime_error {
    explicit IllConditionedError(const std::string& what) : std::runtime_error(what) {}
};

struct InconsistentDataError : std::runtime_error {
    explicit InconsistentDataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wavinv
