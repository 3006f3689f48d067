#include "p1/errors.hpp"

namespace p1 {

const char* kind_name(ErrorKind k)
{
    switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularRecurrence: return "SingularRecurrence";
    case ErrorKind::StokesDirection: return "StokesDirection";
    case ErrorKind::RadiusExceeded: return "RadiusExceeded";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::StepFailure: return "StepFailure";
    case ErrorKind::ChartDeadlock: return "ChartDeadlock";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::FitDegenerate: return "FitDegenerate";
    case ErrorKind::ObstructionNonzero: return "ObstructionNonzero";
    case ErrorKind::OutsideRegion: return "OutsideRegion";
    case ErrorKind::DegenerateCycle: return "DegenerateCycle";
    case ErrorKind::MatchFailure: return "MatchFailure";
    case ErrorKind::CycleBreakdown: return "CycleBreakdown";
    case ErrorKind::NoIntegerConsistency: return "NoIntegerConsistency";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& msg, double estimate)
    : std::runtime_error(msg), kind_(kind), estimate_(estimate)
{
}

void fail(ErrorKind kind, const std::string& msg, double estimate)
{
    throw Error(kind, msg, estimate);
}

} // namespace p1
