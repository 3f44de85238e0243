#pragma once
// Stochastic simulation engines.
//
// Two interchangeable engines sample the exact law of the process:
//
//   direct    - computes every group's exact birth and death rate from the
//               cached sums, advances time by an exponential with the total
//               rate and picks the event by a weighted scan.  No rejected
//               proposals.  This is the fast engine.
//
//   rejection - the acceptance-rejection scheme driven by the global
//               envelope: candidate k arrives after an Exp(cbar) waiting
//               time divided by I(I+1), lands on a uniformly chosen
//               individual, and a single uniform variate classifies it as
//               death, clonal birth, mutant birth (thinned against the
//               mutation envelope) or null.  This is the reference engine;
//               it raises EnvelopeBreach if an acceptance ratio exceeds one.
//
// Both engines share the grouped state and the recorder.

#include <cstdint>
#include <functional>
#include <memory>

#include "ecoevo/population.hpp"
#include "ecoevo/trajectory.hpp"

namespace ecoevo {

enum class EngineKind { direct, rejection };

const char* to_string(EngineKind k);
EngineKind engine_from_string(const std::string& s);

struct Probe {
    std::string name;
    std::function<double(double)> f;
};

struct RecorderConfig {
    double snapshot_dt = 1.0;
    int bins = 200;
    double mass_dt = 0.1;
    bool log_events = false;
    bool affine_terms = false;        // record base/pair death split (affine models)
    std::vector<Probe> probes;        // sampled-integrand martingale probes
    // Histogram range defaults to the trait space; override for unbounded spaces.
    std::optional<std::pair<double, double>> hist_range;
};

struct SimOptions {
    EngineKind engine = EngineKind::direct;
    double t_end = 1.0;
    std::uint64_t seed = 0;
    long long population_cap = 10'000'000;
    std::uint64_t audit_every = 0;     // 0 disables the cache-coherence audit
    double audit_tol = 1e-9;
    std::uint64_t refresh_every = 4'000'000;  // periodic exact rebuild of sums
    bool validate = true;              // run model+scaling validation first
};

/// Runs one trajectory.  Validation failures propagate as ValidationError;
/// runtime failures as the SimulationFault subclasses.  When validation is
/// skipped a warning is recorded in the trajectory.
Trajectory simulate(const ModelSpec& model, const ScalingSpec& scaling,
                    const std::vector<Atom>& init, const SimOptions& opts,
                    const RecorderConfig& rec = {});

// Single-step interface for tests -------------------------------------------

class Recorder;

class Simulator {
public:
    Simulator(const AppliedModel& applied, const std::vector<Atom>& init,
              const SimOptions& opts);
    ~Simulator();

    /// Advances by one event (direct) or one candidate (rejection).
    /// Returns the realized event, or nothing for a null candidate or when
    /// the next waiting time passes t_end (time then stops at t_end).
    std::optional<Event> step_direct(double t_end);
    std::optional<Event> step_rejection(double t_end);

    const Population& population() const;
    const AppliedModel& applied() const;
    Trajectory::Stats& stats();
    std::optional<double> extinction_time() const;
    void run(double t_end, EngineKind kind, Recorder* recorder);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ecoevo
