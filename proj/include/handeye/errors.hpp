#pragma once

#include <stdexcept>
#include <string>

namespace handeye {

// Base class for every error this library throws on purpose.
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonUnitQuaternion : CalibrationError {
    using CalibrationError::CalibrationError;
};

struct NotARotation : CalibrationError {
    using CalibrationError::CalibrationError;
};

struct NonUnitDualQuaternion : CalibrationError {
    using CalibrationError::CalibrationError;
};

struct NotSymmetric : CalibrationError {
    using CalibrationError::CalibrationError;
};

// Raised when the KKT system of an equality-constrained QP is singular,
// i.e. the constraint rows are linearly dependent.
struct SingularKKT : CalibrationError {
    using CalibrationError::CalibrationError;
};

struct MalformedInput : CalibrationError {
    using CalibrationError::CalibrationError;
};

struct TooFewMeasurements : CalibrationError {
    using CalibrationError::CalibrationError;
};

struct UnknownFixture : CalibrationError {
    using CalibrationError::CalibrationError;
};

struct BadFlag : CalibrationError {
    using CalibrationError::CalibrationError;
};

} // namespace handeye
