#pragma once

#include <stdexcept>
#include <string>

namespace icsim {

// Message exceeded the b-bit budget at round `round` (1-based).
struct BudgetExceeded : std::runtime_error {
    int round;
    int length;
    int budget;
    BudgetExceeded(int round, int length, int budget)
        : std::runtime_error("message of " + std::to_string(length) + " bits exceeds budget b=" +
                             std::to_string(budget) + " at round " + std::to_string(round)),
          round(round), length(length), budget(budget) {}
};

struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

struct EnumerationTooLarge : std::runtime_error {
    explicit EnumerationTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidReduction : std::runtime_error {
    explicit InvalidReduction(const std::string& what) : std::runtime_error(what) {}
};

struct RhoOutOfRange : std::runtime_error {
    explicit RhoOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct BudgetTooSmall : std::runtime_error {
    explicit BudgetTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct DivisionByZeroSupport : std::runtime_error {
    explicit DivisionByZeroSupport(const std::string& what) : std::runtime_error(what) {}
};

struct NotIndependent : std::runtime_error {
    explicit NotIndependent(const std::string& what) : std::runtime_error(what) {}
};

struct AlphabetTooLarge : std::runtime_error {
    explicit AlphabetTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct UnboundedRatio : std::runtime_error {
    explicit UnboundedRatio(const std::string& what) : std::runtime_error(what) {}
};

struct TargetNotBracketed : std::runtime_error {
    explicit TargetNotBracketed(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace icsim
