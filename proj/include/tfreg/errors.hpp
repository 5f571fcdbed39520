#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace tfreg {

// Broken precondition, malformed input, or internal consistency failure.
// The CLI maps this to exit code 3.
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A pipeline stage could not produce the structure it is responsible for at
// the requested scale (quota not met, flow infeasible, plan degenerate).
// Carries the stage name so callers can log and retry. CLI exit code 2.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(std::string stage, const std::string& detail)
        : std::runtime_error(stage + ": " + detail), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

// Filesystem or parse failure. Parse messages carry 1-based line numbers.
// CLI exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tfreg
