#pragma once

#include <exception>
#include <string>
#include <utility>

namespace isoradial {

class Error : public std::exception
{
public:
    explicit Error(std::string msg) : msg_(std::move(msg)) {}
    const char* what() const noexcept override { return msg_.c_str(); }

private:
    std::string msg_;
};

#define ISORADIAL_ERROR(Name)                                                  \
    class Name : public Error                                                  \
    {                                                                          \
    public:                                                                    \
        explicit Name(const std::string& msg) : Error(#Name ": " + msg) {}     \
    };

ISORADIAL_ERROR(InvalidGraph)
ISORADIAL_ERROR(DegenerateRhombus)
ISORADIAL_ERROR(EmptyInput)
ISORADIAL_ERROR(EmptyDomain)
ISORADIAL_ERROR(RegionExceedsLattice)
ISORADIAL_ERROR(NotARectangle)
ISORADIAL_ERROR(NotOnBoundary)
ISORADIAL_ERROR(NotSimplyConnected)
ISORADIAL_ERROR(MissingValues)
ISORADIAL_ERROR(NotAPath)
ISORADIAL_ERROR(NotHolomorphic)
ISORADIAL_ERROR(ContourNotFound)
ISORADIAL_ERROR(KernelUnavailable)
ISORADIAL_ERROR(PoleHit)
ISORADIAL_ERROR(QuadratureNotConverged)
ISORADIAL_ERROR(NoAdmissiblePath)
ISORADIAL_ERROR(SolverDiverged)
ISORADIAL_ERROR(IllConditioned)
ISORADIAL_ERROR(LayoutViolation)
ISORADIAL_ERROR(PreconditionViolated)
ISORADIAL_ERROR(DegenerateFit)
ISORADIAL_ERROR(OracleFailure)
ISORADIAL_ERROR(InsufficientSpread)
ISORADIAL_ERROR(FormatError)

#undef ISORADIAL_ERROR

} // namespace isoradial
