#pragma once
#include <stdexcept>
#include <string>

namespace isac {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Vehicle at/through an RSU foot point, zero range, or an inadmissible
/// state-evolution radicand.
struct DegenerateGeometry : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// Beamforming gain |a^H f| below threshold; measurement-noise variances
/// would diverge.
struct BeamNull : Error {
    using Error::Error;
};

struct SingularInnovation : Error {
    using Error::Error;
};

struct SingularPrior : Error {
    using Error::Error;
};

/// Sensing threshold exceeds what any unit-norm beam can attain.
struct InfeasibleSensing : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace isac
