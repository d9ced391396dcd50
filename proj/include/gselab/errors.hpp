#pragma once

#include <stdexcept>
#include <string>

namespace gselab {

// Shape disagreement between arrays, interactions or partitions.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad call argument (k < r, eps <= 0, missing coordinate, ...).
struct ArgumentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Value outside the declared domain (unknown color, eval bound exceeded).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An enumeration guard was exceeded; callers should switch to a heuristic.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A microcanonical constraint admits no integer partition.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Experiment configuration is unusable (unknown estimator, missing oracle).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gselab
