#pragma once

#include <stdexcept>
#include <string>

namespace rspomdp {

/// Base class for all library errors. `name()` is the stable machine-readable
/// identifier that the CLI puts into structured error output.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class InadmissibleAction : public Error {
public:
    explicit InadmissibleAction(const std::string& m) : Error("InadmissibleAction", m) {}
};

class GridOverflow : public Error {
public:
    explicit GridOverflow(const std::string& m) : Error("GridOverflow", m) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& m) : Error("DomainError", m) {}
};

class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& m) : Error("OverflowError", m) {}
};

/// Raised when an update operator is evaluated at an observation whose
/// predictive mass is zero (or numerically indistinguishable from zero).
/// Carries the computed mass and, for trace errors, the step index.
class UnreachableObservation : public Error {
public:
    UnreachableObservation(const std::string& m, double mass_, int step_ = -1)
        : Error("UnreachableObservation", m), mass(mass_), step(step_) {}

    double mass;
    int step;
};

class PolicyIncomplete : public Error {
public:
    explicit PolicyIncomplete(const std::string& m) : Error("PolicyIncomplete", m) {}
};

class WrongUtility : public Error {
public:
    explicit WrongUtility(const std::string& m) : Error("WrongUtility", m) {}
};

class BetaOne : public Error {
public:
    explicit BetaOne(const std::string& m) : Error("BetaOne", m) {}
};

class CostNotPositive : public Error {
public:
    explicit CostNotPositive(const std::string& m) : Error("CostNotPositive", m) {}
};

class NonMonotoneUtility : public Error {
public:
    explicit NonMonotoneUtility(const std::string& m) : Error("NonMonotoneUtility", m) {}
};

class TooLarge : public Error {
public:
    explicit TooLarge(const std::string& m) : Error("TooLarge", m) {}
};

class OutOfRange : public Error {
public:
    explicit OutOfRange(const std::string& m) : Error("OutOfRange", m) {}
};

/// Malformed or unreadable input file (model, policy, ...).
class InvalidFile : public Error {
public:
    explicit InvalidFile(const std::string& m) : Error("InvalidFile", m) {}
};

} // namespace rspomdp
