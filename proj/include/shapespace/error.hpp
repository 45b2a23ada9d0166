#pragma once

#include <stdexcept>
#include <string>

namespace shapespace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    /// Stable machine-readable name, used by the CLI and the Python bindings.
    [[nodiscard]] virtual const char* kind() const noexcept { return "Error"; }
};

#define SHAPESPACE_DEFINE_ERROR(Name, Base)                                   \
    class Name : public Base {                                                \
    public:                                                                   \
        using Base::Base;                                                     \
        [[nodiscard]] const char* kind() const noexcept override { return #Name; } \
    };

// Argument and shape problems.
SHAPESPACE_DEFINE_ERROR(InvalidArgument, Error)
SHAPESPACE_DEFINE_ERROR(ShapeMismatch, InvalidArgument)
SHAPESPACE_DEFINE_ERROR(InvalidLandmarks, InvalidArgument)

// Numerical failures.
SHAPESPACE_DEFINE_ERROR(NumericalError, Error)
SHAPESPACE_DEFINE_ERROR(NearSingular, NumericalError)
SHAPESPACE_DEFINE_ERROR(EnergyDrift, NumericalError)
SHAPESPACE_DEFINE_ERROR(Collision, NumericalError)
SHAPESPACE_DEFINE_ERROR(DegeneratePlane, NumericalError)

// Hunter-Saxton chart.
SHAPESPACE_DEFINE_ERROR(InvalidDiffeo, InvalidArgument)
SHAPESPACE_DEFINE_ERROR(BoundaryHit, NumericalError)
SHAPESPACE_DEFINE_ERROR(DegenerateDirection, InvalidArgument)

#undef SHAPESPACE_DEFINE_ERROR

}  // namespace shapespace
