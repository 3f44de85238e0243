#include "ecoevo/tss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ecoevo/engine.hpp"
#include "ecoevo/ensemble.hpp"
#include "ecoevo/population.hpp"
#include "ecoevo/rng.hpp"
#include "ecoevo/solvers.hpp"
#include "ecoevo/stats.hpp"

namespace ecoevo {

namespace {

double fitness_with_nbar(const ModelSpec& model, double y, double x, double nb) {
    const double zv = (*model.V)(y - x) * nb;
    const double zu = (*model.U)(y - x) * nb;
    return model.birth(y, zv) - model.death(y, zu);
}

double invasion_with_nbar(const ModelSpec& model, double y, double x, double nb) {
    const double f = fitness_with_nbar(model, y, x, nb);
    if (f <= 0.0) return 0.0;
    const double b = model.birth(y, (*model.V)(y - x) * nb);
    if (!(b > 0.0))
        throw DegenerateBirthRate("positive fitness with zero birth rate at y = " +
                                  std::to_string(y));
    return f / b;
}

/// Equilibrium density extended by its extinction limit: traits that cannot
/// sustain a population (b <= d at zero density, e.g. the upper edge of the
/// asymmetric-competition interval) carry mass zero instead of an error, so
/// interpolation tables covering the whole space stay finite.
double nbar_or_zero(const ModelSpec& model, double x) {
    try {
        return equilibrium_nbar(model, x);
    } catch (const NoPositiveEquilibrium&) {
        return 0.0;
    }
}

}  // namespace

double fitness(const ModelSpec& model, double y, double x) {
    return fitness_with_nbar(model, y, x, equilibrium_nbar(model, x));
}

double invasion_probability(const ModelSpec& model, double y, double x) {
    return invasion_with_nbar(model, y, x, equilibrium_nbar(model, x));
}

double tss_beta(const ModelSpec& model, double x) {
    const double nb = equilibrium_nbar(model, x);
    return model.mu(x) * nb * model.birth(x, (*model.V)(0.0) * nb);
}

// ---------------------------------------------------------------------------
// equilibrium cache
// ---------------------------------------------------------------------------

EquilibriumCache::EquilibriumCache(const ModelSpec& model, int nodes) : model_(&model) {
    if (!model.space.bounded) throw ConfigError("equilibrium cache needs a bounded trait space");
    if (nodes < 8) throw ConfigError("equilibrium cache needs at least 8 nodes");
    lo_ = model.space.lo;
    hi_ = model.space.hi;
    dx_ = (hi_ - lo_) / (nodes - 1);
    values_.resize(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i)
        values_[static_cast<std::size_t>(i)] = nbar_or_zero(model, lo_ + i * dx_);
}

double EquilibriumCache::nbar_direct(double x) const { return nbar_or_zero(*model_, x); }

double EquilibriumCache::nbar(double x) const {
    const int n = static_cast<int>(values_.size());
    double u = (x - lo_) / dx_;
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, n - 2);
    const double t = u - i;
    // Local cubic Hermite with centered-difference slopes (one-sided at the ends).
    const double y0 = values_[static_cast<std::size_t>(i)];
    const double y1 = values_[static_cast<std::size_t>(i + 1)];
    const double m0 = i > 0 ? 0.5 * (y1 - values_[static_cast<std::size_t>(i - 1)])
                            : y1 - y0;
    const double m1 = i + 2 < n ? 0.5 * (values_[static_cast<std::size_t>(i + 2)] - y0)
                                : y1 - y0;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * m1;
}

// ---------------------------------------------------------------------------
// substitution sequence
// ---------------------------------------------------------------------------

double TssPath::trait_at(double t) const {
    double x = jumps.empty() ? final_trait : jumps.front().from;
    for (const TssJump& j : jumps) {
        if (j.time > t) return x;
        x = j.to;
    }
    return x;
}

TssPath simulate_tss(const ModelSpec& model, double x0, double t_end, std::uint64_t seed,
                     const TssOptions& opts) {
    Rng rng(seed);
    std::optional<EquilibriumCache> cache;
    if (opts.use_cache && model.space.bounded)
        cache.emplace(model, opts.cache_nodes);
    auto nbar_of = [&](double x) { return cache ? cache->nbar(x) : equilibrium_nbar(model, x); };

    TssPath path;
    path.t_end = t_end;
    double x = x0;
    double t = 0.0;
    double nb = nbar_of(x);
    std::uint64_t consecutive = 0;
    // First jump record carries `from`, so seed it lazily on the first accept.
    while (true) {
        const double beta = model.mu(x) * nb * model.birth(x, (*model.V)(0.0) * nb);
        if (!(beta > 0.0)) break;  // no further proposals can arrive
        t += rng.exp_time(beta);
        if (t > t_end) break;
        const double y = model.mutation.sample(rng, x);
        ++path.proposals;
        const double p = invasion_with_nbar(model, y, x, nb);
        if (rng.uniform() < p) {
            path.jumps.push_back({t, x, y});
            ++path.accepted;
            x = y;
            nb = nbar_of(x);
            consecutive = 0;
        } else if (++consecutive >= opts.stall_limit) {
            path.stalled = true;
            break;
        }
    }
    path.final_trait = x;
    return path;
}

// ---------------------------------------------------------------------------
// invasion experiment
// ---------------------------------------------------------------------------

InvasionReport invasion_experiment(const ModelSpec& model, const ScalingSpec& scaling,
                                   double y, double x, int replicates, std::uint64_t seed,
                                   const InvasionOptions& opts) {
    if (replicates < 1) throw ConfigError("invasion experiment needs at least one replicate");
    ModelSpec frozen = model;  // mutation switched off: the pair evolves alone
    frozen.mu = [](double) { return 0.0; };

    const double nb = equilibrium_nbar(model, x);
    const long long resident = opts.resident_count > 0
                                   ? opts.resident_count
                                   : std::llround(scaling.K * nb);
    if (resident < 1) throw ConfigError("resident population rounds to zero; raise K");

    InvasionReport rep;
    rep.y = y;
    rep.x = x;
    rep.K = scaling.K;
    rep.replicates = replicates;
    rep.predicted = invasion_probability(model, y, x);

    const AppliedModel applied(frozen, scaling);
    const std::vector<Atom> init = {{x, resident}, {y, 1}};
    struct Outcome {
        int state = 0;  // 0 timeout, 1 mutant fixed, 2 mutant lost
        double theta0 = 0.0;
    };
    std::vector<Outcome> out(static_cast<std::size_t>(replicates));
    run_ensemble(replicates, opts.workers,
                 [&](int r, std::uint64_t rep_seed) {
                     SimOptions so;
                     so.seed = rep_seed;
                     so.t_end = 1e18;
                     Simulator sim(applied, init, so);
                     std::uint64_t events = 0;
                     Outcome& o = out[static_cast<std::size_t>(r)];
                     while (sim.population().group_count() > 1) {
                         if (events >= opts.event_cap) { o.state = 0; return; }
                         if (sim.step_direct(1e18)) ++events;
                         else { o.state = 0; return; }  // horizon hit: treat as timeout
                     }
                     o.theta0 = sim.population().time();
                     const auto& pop = sim.population();
                     const bool mutant_won =
                         pop.group_count() == 1 && pop.trait(0) == y;
                     o.state = mutant_won ? 1 : 2;
                 },
                 seed);

    double theta_sum = 0.0;
    for (const Outcome& o : out) {
        if (o.state == 0) { ++rep.timeouts; continue; }
        ++rep.completed;
        theta_sum += o.theta0;
        if (o.state == 1) ++rep.fixations;
    }
    if (rep.completed > 0) {
        rep.fix_freq = static_cast<double>(rep.fixations) / rep.completed;
        rep.mean_theta0 = theta_sum / rep.completed;
        rep.sigma = binomial_sigma(rep.predicted, rep.completed);
    }
    return rep;
}

}  // namespace ecoevo
