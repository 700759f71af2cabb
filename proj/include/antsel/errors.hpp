#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace antsel {

// Invalid user-facing configuration. Collects every violation found rather
// than stopping at the first one.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
    explicit ConfigError(const std::string& issue)
        : ConfigError(std::vector<std::string>{issue}) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& e : v) {
            if (!s.empty()) s += "; ";
            s += e;
        }
        return s;
    }
    std::vector<std::string> issues_;
};

// Numerical evaluation failure (non-convergence, quadrature disagreement, ...).
// The message carries the diagnostic context needed to reproduce the call.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A trial budget interrupted by the wall-clock guard. Carries what completed.
class PartialResultError : public std::runtime_error {
public:
    PartialResultError(const std::string& what, std::uint64_t completed_trials)
        : std::runtime_error(what), completed_trials_(completed_trials) {}
    std::uint64_t completed_trials() const { return completed_trials_; }

private:
    std::uint64_t completed_trials_;
};

} // namespace antsel
