#pragma once

#include <stdexcept>
#include <string>

namespace dnlw {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input outside the supported parameter or argument range.
struct DomainError : Error {
    using Error::Error;
};

/// Bisection endpoints classify identically; no critical speed bracketed.
struct BracketError : Error {
    using Error::Error;
};

/// Adaptive integrator could not make progress (step underflow / step cap).
struct StepFailure : Error {
    using Error::Error;
};

/// Profile anchor value lies outside the trajectory's range.
struct AnchorError : Error {
    using Error::Error;
};

/// Fit window contains too few samples.
struct WindowError : Error {
    using Error::Error;
};

/// Requested change-sign wave amplitude below the admissible threshold.
struct DeltaTooSmall : Error {
    using Error::Error;
};

/// Requested wave speed below the critical speed.
struct SpeedTooLow : Error {
    using Error::Error;
};

/// Profile grid does not reach far enough into the tail for a fit.
struct TailTooShort : Error {
    using Error::Error;
};

/// Time step exceeds the stability bound of the explicit scheme.
struct CFLError : Error {
    using Error::Error;
};

/// Wave supports do not fit into the requested grid.
struct GridTooSmall : Error {
    using Error::Error;
};

/// Not enough samples for the requested measurement.
struct InsufficientData : Error {
    using Error::Error;
};

}  // namespace dnlw
