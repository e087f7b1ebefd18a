#pragma once

#include <stdexcept>
#include <string>

namespace sdom {

// Common base so callers can catch any library fault in one clause while
// tests can still assert the precise failure kind.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// dyadic
struct DepthExceeded : Error { using Error::Error; };
struct RootHasNoParent : Error { using Error::Error; };
struct IntervalTooLong : Error { using Error::Error; };

// signal calculus
struct EmptyCube : Error { using Error::Error; };
struct NonconvergentBisection : Error { using Error::Error; };
struct PointOutsideCube : Error { using Error::Error; };

// operators
struct EpsilonBelowResolution : Error { using Error::Error; };
struct DivergentSum : Error { using Error::Error; };

// sparse recursion
struct NotDyadic : Error { using Error::Error; };
struct CalibrationFailure : Error { using Error::Error; };
struct ResolutionFloor : Error { using Error::Error; };

// harness
struct InsufficientRange : Error { using Error::Error; };
struct DegenerateFit : Error { using Error::Error; };
struct IoFailure : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

} // namespace sdom
