#pragma once
// Recorded output of one simulation run.
//
// Time series are sampled at fixed cadences; between recorded events the
// compensator and bracket accumulators for the constant test function are
// integrated exactly (the integrands are piecewise constant between jumps),
// so martingale diagnostics on the total mass carry no quadrature error.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecoevo/population.hpp"

namespace ecoevo {

enum class EventKind : std::uint8_t { clonal_birth, mutant_birth, death };

const char* to_string(EventKind k);

struct Event {
    double time;
    EventKind kind;
    double parent_trait;
    double child_trait;   // equals parent_trait for clonal births and deaths
};

/// A named test function f with the integrands of its compensator and
/// predictable bracket sampled at snapshot times.
struct ProbeTrack {
    std::string name;
    std::vector<double> value;      // <nu_t, f>
    std::vector<double> drift;      // integrand of the compensator at t
    std::vector<double> bracket;    // integrand of the bracket at t
};

struct Trajectory {
    double K = 1.0;
    bool renormalized = false;
    std::uint64_t seed = 0;
    std::string engine;

    std::vector<double> bin_edges;              // bins + 1 edges
    std::vector<double> snap_times;
    std::vector<std::vector<double>> histogram; // mass per bin at each snapshot

    std::vector<double> mass_times;
    std::vector<double> mass;                   // <nu_t, 1> at mass cadence
    std::vector<double> drift1;                 // exact integral of (B - D) up to t
    std::vector<double> bracket1;               // exact integral of (B + D) up to t
    std::vector<double> pair_term;              // competition part of D at t (affine models)
    std::vector<double> base_term;              // B minus base death at t (affine models)

    std::vector<ProbeTrack> probes;

    std::vector<Event> events;                  // only when event logging is on
    std::optional<double> extinction_time;
    std::vector<Atom> final_atoms;
    double t_end = 0.0;

    struct Stats {
        std::uint64_t events = 0;
        std::uint64_t candidates = 0;  // rejection engine: proposed including null
        std::uint64_t clonal = 0, mutant = 0, deaths = 0;
        double worst_acceptance = 0.0; // largest acceptance ratio seen
        long long max_count = 0;
    } stats;

    std::vector<std::string> warnings;
};

/// Rescales a trajectory by its carrying capacity in place: masses,
/// histograms and compensators divide by K, the bracket by K^2.  Throws
/// AlreadyRenormalized on a second call.
void renormalize(Trajectory& traj);

}  // namespace ecoevo
