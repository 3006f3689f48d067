#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace p1 {

enum class ErrorKind {
    InvalidArgument,
    SingularRecurrence,
    StokesDirection,
    RadiusExceeded,
    NoConvergence,
    QuadratureFailure,
    NonConvergent,
    StepFailure,
    ChartDeadlock,
    BranchCut,
    SingularTransform,
    FitDegenerate,
    ObstructionNonzero,
    OutsideRegion,
    DegenerateCycle,
    MatchFailure,
    CycleBreakdown,
    NoIntegerConsistency,
    ConfigError
};

const char* kind_name(ErrorKind k);

// Every module reports failures through this type. `estimate` carries the
// achieved error estimate where one exists (NaN otherwise).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg, double estimate = std::numeric_limits<double>::quiet_NaN());
    ErrorKind kind() const noexcept { return kind_; }
    double estimate() const noexcept { return estimate_; }

private:
    ErrorKind kind_;
    double estimate_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg,
                       double estimate = std::numeric_limits<double>::quiet_NaN());

} // namespace p1
