#pragma once
// Trait substitution layer: invasion fitness, fixation probability of a rare
// mutant, and the evolutionary-timescale jump process over resident traits.

#include <cstdint>
#include <optional>
#include <vector>

#include "ecoevo/model.hpp"

namespace ecoevo {

/// Growth rate of a rare mutant y against a resident x population settled at
/// its equilibrium density: b(y, V(y-x) nbar(x)) - d(y, U(y-x) nbar(x)).
double fitness(const ModelSpec& model, double y, double x);

/// Fixation probability of a single y-mutant in the resident-x background:
/// positive part of the fitness divided by the mutant birth rate (branching
/// approximation, exact in the large-K limit).  Throws DegenerateBirthRate
/// when the fitness is positive while the birth rate vanishes.
double invasion_probability(const ModelSpec& model, double y, double x);

/// Rate of mutant appearance on the rescaled clock: mu(x) nbar(x) b(x, V(0) nbar(x)).
double tss_beta(const ModelSpec& model, double x);

/// Interpolating cache for nbar over the trait space; direct evaluation stays
/// available as the accuracy oracle.
class EquilibriumCache {
public:
    EquilibriumCache(const ModelSpec& model, int nodes = 512);
    double nbar(double x) const;          // cubic interpolation
    double nbar_direct(double x) const;   // no interpolation

private:
    const ModelSpec* model_;
    double lo_, hi_, dx_;
    std::vector<double> values_;
};

struct TssJump {
    double time;   // rescaled clock
    double from;
    double to;
};

struct TssOptions {
    std::uint64_t stall_limit = 1'000'000;  // consecutive failed proposals
    bool use_cache = true;
    int cache_nodes = 512;
};

struct TssPath {
    std::vector<TssJump> jumps;
    double t_end = 0.0;
    double final_trait = 0.0;
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
    bool stalled = false;   // stall limit hit; path returned as-is

    double trait_at(double t) const;
};

/// Exact simulation of the substitution sequence: wait Exp(beta(x)), draw the
/// mutant from M(x, .), accept with the invasion probability.
TssPath simulate_tss(const ModelSpec& model, double x0, double t_end,
                     std::uint64_t seed, const TssOptions& opts = {});

struct InvasionReport {
    double y = 0.0, x = 0.0;
    double K = 0.0;
    int replicates = 0;
    int completed = 0;       // reached a monomorphic state
    int timeouts = 0;        // hit the event cap; excluded from frequencies
    int fixations = 0;
    double fix_freq = 0.0;
    double predicted = 0.0;
    double sigma = 0.0;      // binomial std of fix_freq under `predicted`
    double mean_theta0 = 0.0;  // mean time to a monomorphic state
};

struct InvasionOptions {
    std::uint64_t event_cap = 200'000'000;  // per replicate
    long long resident_count = 0;            // 0: round(K nbar(x))
    int workers = 1;
};

/// Monte Carlo fixation experiment: resident population at equilibrium plus
/// one mutant, no further mutation, run to a monomorphic state.
InvasionReport invasion_experiment(const ModelSpec& model, const ScalingSpec& scaling,
                                   double y, double x, int replicates,
                                   std::uint64_t seed, const InvasionOptions& opts = {});

}  // namespace ecoevo
