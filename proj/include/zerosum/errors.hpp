#pragma once

#include <stdexcept>
#include <string>

namespace zerosum {

// Raised when an exact computation would exceed its configured resource
// budget. Callers must treat this as "no answer", never as a result.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a search or extraction reaches a state that the underlying
// theorems rule out. Carries a serialized reproducer; never swallowed.
class TheoremContradiction : public std::runtime_error {
public:
    TheoremContradiction(const std::string& what, std::string reproducer)
        : std::runtime_error(what), reproducer_(std::move(reproducer)) {}

    const std::string& reproducer() const { return reproducer_; }

private:
    std::string reproducer_;
};

}  // namespace zerosum
