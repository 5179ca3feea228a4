#pragma once

#include <stdexcept>
#include <string>

namespace ldg {

enum class ErrorKind {
    NotInS0,
    NotUnit,
    NotOnSphere,
    NotTangent,
    IsotropicPoint,
    BadParams,
    ResolutionTooCoarse,
    InvalidDomain,
    GridMismatch,
    BallEscapesDomain,
    LineSearchStalled,
    NoConvergence,
    DomainMismatch,
    SingularIntegrand,
    EmptyLevelSet,
    EigenvalueGapTooSmall,
    LiftingObstructed,
    DegreeUnresolved,
    ConfigInvalid,
    IoError,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace ldg
