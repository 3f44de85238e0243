#pragma once
// Shared error types and small utilities.
//
// Error taxonomy maps onto the CLI exit-code contract:
//   ConfigError (and argument parse errors)    -> exit 2
//   ValidationError, SimulationFault subclasses -> exit 3
//   statistical-check failures (command logic)  -> exit 4
//   IoError and anything unexpected             -> exit 1

#include <stdexcept>
#include <string>

namespace ecoevo {

inline constexpr const char* kVersion = "1.0.0";

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user configuration (unknown keys, missing seed, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// Model definition breaks one of its declared bounds or normalizations.
/// `hard` distinguishes a bound violated at a concrete witness point from a
/// quadrature that failed to confirm kernel normalization.
struct ValidationError : Error {
    bool hard;
    std::string witness;
    ValidationError(bool hard_, const std::string& what, const std::string& witness_)
        : Error(what), hard(hard_), witness(witness_) {}
};

/// Base for failures raised while a simulation or solver is running.
struct SimulationFault : Error {
    using Error::Error;
};

/// Population exceeded the configured hard cap on individual count.
struct PopulationExplosion : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Rejection sampler observed an acceptance ratio above one; the model's
/// declared envelope constants are wrong.
struct EnvelopeBreach : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Density solver clipped more negative mass than the tolerated fraction.
struct NegativeDensityBlowup : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Explicit diffusion step size above the stability bound.
struct CFLViolation : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// No positive root for the single-trait equilibrium.
struct NoPositiveEquilibrium : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Mutant growth rate positive while the birth rate at the candidate is zero;
/// the invasion-probability ratio is undefined.
struct DegenerateBirthRate : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Two measures compared by a transport metric carry different total mass.
struct MassMismatch : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Atom index outside the live population.
struct IndexOutOfRange : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Trajectory was already rescaled by its carrying capacity.
struct AlreadyRenormalized : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Recorded snapshot cadence too coarse for the requested quadrature.
struct InsufficientCadence : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Adaptive quadrature failed to reach its tolerance.
struct QuadratureFailure : SimulationFault {
    using SimulationFault::SimulationFault;
};

/// Filesystem failure: unreadable config, unwritable output.
struct IoError : Error {
    using Error::Error;
};

}  // namespace ecoevo
