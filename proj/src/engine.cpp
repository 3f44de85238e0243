#include "ecoevo/engine.hpp"

#include <cmath>
#include <sstream>

#include "ecoevo/recorder.hpp"
#include "ecoevo/rng.hpp"

namespace ecoevo {

const char* to_string(EngineKind k) {
    return k == EngineKind::direct ? "direct" : "rejection";
}

EngineKind engine_from_string(const std::string& s) {
    if (s == "direct") return EngineKind::direct;
    if (s == "rejection") return EngineKind::rejection;
    throw ConfigError("unknown engine '" + s + "'");
}

namespace {

struct Pending {
    double t = 0.0;
    int kind = 0;  // 0 clock-only, 1 clonal, 2 mutant, 3 death
    std::size_t group = 0;
    double parent = 0.0;
    double child = 0.0;
};

}  // namespace

struct Simulator::Impl {
    AppliedModel applied;  // owns the scaling-resolved mutation kernel
    SimOptions opts;
    Population pop;
    Rng rng;
    bool affine;

    // Per-group rate caches, index-aligned with the population's group order.
    std::vector<double> bc;    // per-capita birth
    std::vector<double> d0c;   // per-capita base death
    std::vector<double> ac;    // competition coefficient
    std::vector<double> muc;   // mutation probability
    std::vector<double> nd;    // multiplicity as double
    std::vector<double> rb;    // group birth rate
    std::vector<double> rd;    // group death rate
    double Btot = 0.0, Dtot = 0.0, ND0 = 0.0;

    Trajectory::Stats stats;
    std::optional<double> extinction;
    std::uint64_t since_audit = 0, since_refresh = 0;

    Impl(const AppliedModel& am, const std::vector<Atom>& init, const SimOptions& o)
        : applied(am), opts(o), pop(applied, init), rng(o.seed), affine(am.affine()) {
        stats.max_count = pop.count();
        rebuild_caches();
    }

    double base_minus() const { return affine ? Btot - ND0 : 0.0; }
    double pair_term() const { return affine ? Dtot - ND0 : 0.0; }

    void rebuild_caches() {
        const std::size_t G = pop.group_count();
        bc.resize(G);
        d0c.resize(G);
        ac.resize(G);
        muc.resize(G);
        nd.resize(G);
        rb.resize(G);
        rd.resize(G);
        Btot = 0.0;
        ND0 = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            const double x = pop.trait(g);
            nd[g] = static_cast<double>(pop.multiplicity(g));
            muc[g] = applied.mu(x);
            if (affine) {
                bc[g] = applied.coef_b(x);
                d0c[g] = applied.coef_d0(x);
                ac[g] = applied.coef_alpha(x);
                rb[g] = nd[g] * bc[g];
                Btot += rb[g];
                ND0 += nd[g] * d0c[g];
            }
        }
        resweep();
    }

    /// Refreshes every competition-dependent group rate from the cached sums.
    /// Runs after each event; the population's sums are already current.
    void resweep() {
        const std::size_t G = pop.group_count();
        const double* su = pop.su_data();
        double D = 0.0;
        if (affine) {
            for (std::size_t g = 0; g < G; ++g) {
                const double r = nd[g] * (d0c[g] + ac[g] * su[g]);
                rd[g] = r;
                D += r;
            }
        } else {
            double B = 0.0;
            for (std::size_t g = 0; g < G; ++g) {
                const double x = pop.trait(g);
                const double b = applied.birth(x, pop.sum_v(g));
                const double d = applied.death(x, su[g]);
                rb[g] = nd[g] * b;
                rd[g] = nd[g] * d;
                B += rb[g];
                D += rd[g];
            }
            Btot = B;
        }
        Dtot = D;
    }

    void cache_push(double z) {
        muc.push_back(applied.mu(z));
        nd.push_back(1.0);
        if (affine) {
            bc.push_back(applied.coef_b(z));
            d0c.push_back(applied.coef_d0(z));
            ac.push_back(applied.coef_alpha(z));
            rb.push_back(bc.back());
            Btot += bc.back();
            ND0 += d0c.back();
        } else {
            bc.push_back(0.0);
            d0c.push_back(0.0);
            ac.push_back(0.0);
            rb.push_back(0.0);
        }
        rd.push_back(0.0);
    }

    void cache_erase(std::size_t g, std::size_t moved_from) {
        if (g != moved_from) {
            bc[g] = bc[moved_from];
            d0c[g] = d0c[moved_from];
            ac[g] = ac[moved_from];
            muc[g] = muc[moved_from];
            nd[g] = nd[moved_from];
            rb[g] = rb[moved_from];
            rd[g] = rd[moved_from];
        }
        bc.pop_back();
        d0c.pop_back();
        ac.pop_back();
        muc.pop_back();
        nd.pop_back();
        rb.pop_back();
        rd.pop_back();
    }

    Pending plan_direct(double t_end) {
        if (pop.count() == 0) return {t_end, 0};
        const double R = Btot + Dtot;
        if (!(R > 0.0)) return {t_end, 0};
        const double tn = pop.time() + rng.exp_time(R);
        if (tn > t_end) return {t_end, 0};

        double target = rng.uniform() * R;
        const std::size_t G = pop.group_count();
        std::size_t g = 0;
        int kind = 0;
        double acc = 0.0;
        for (; g < G; ++g) {
            if (target < acc + rb[g]) {
                kind = 1;
                break;
            }
            acc += rb[g];
            if (target < acc + rd[g]) {
                kind = 3;
                break;
            }
            acc += rd[g];
        }
        if (g == G) {
            // Roundoff pushed the target past the prefix sums; take the last
            // group with positive rate.
            for (g = G; g-- > 0;) {
                if (rd[g] > 0.0) {
                    kind = 3;
                    break;
                }
                if (rb[g] > 0.0) {
                    kind = 1;
                    break;
                }
            }
            if (kind == 0) return {t_end, 0};
        }
        const double x = pop.trait(g);
        if (kind == 1) {
            const double mu = muc[g];
            if (mu > 0.0 && rng.uniform() < mu) {
                const double z = applied.mutation().sample(rng, x);
                return {tn, 2, g, x, z};
            }
            return {tn, 1, g, x, x};
        }
        return {tn, 3, g, x, x};
    }

    Pending plan_rejection(double t_end) {
        const long long I = pop.count();
        if (I == 0) return {t_end, 0};
        const double cbar = applied.cbar();
        if (!(cbar > 0.0)) return {t_end, 0};
        const double di = static_cast<double>(I);
        const double tn = pop.time() + rng.exp_time(cbar) / (di * (di + 1.0));
        if (tn > t_end) return {t_end, 0};
        ++stats.candidates;

        // Uniform individual, then the cached per-capita rates of its group.
        std::size_t g = 0;
        {
            std::uint64_t pick = rng.below(static_cast<std::uint64_t>(I));
            while (pick >= static_cast<std::uint64_t>(pop.multiplicity(g))) {
                pick -= static_cast<std::uint64_t>(pop.multiplicity(g));
                ++g;
            }
        }
        const double x = pop.trait(g);
        double bpc, dpc;
        if (affine) {
            bpc = bc[g];
            dpc = d0c[g] + ac[g] * pop.sum_u(g);
        } else {
            bpc = applied.birth(x, pop.sum_v(g));
            dpc = applied.death(x, pop.sum_u(g));
        }
        const double denom = cbar * (di + 1.0);
        const double mu = muc[g];
        const double w1 = dpc / denom;
        const double w2 = w1 + (1.0 - mu) * bpc / denom;
        double w3 = w2;
        double z = x;
        if (mu > 0.0) {
            const double step = applied.mutation().sample_envelope(rng);
            const double env = applied.mutation().envelope_density(step);
            if (env > 0.0) {
                const double dens = applied.mutation().density(x, x + step);
                w3 = w2 + mu * bpc * dens / (env * denom);
                z = x + step;
            }
        }
        if (w3 > 1.0 + 1e-9) {
            std::ostringstream os;
            os << "acceptance bands exceed one (total " << w3 << " at trait " << x
               << ", population " << I << "); the declared envelopes are too small";
            throw EnvelopeBreach(os.str());
        }
        stats.worst_acceptance = std::max(stats.worst_acceptance, w3);

        const double W = rng.uniform();
        if (W < w1) return {tn, 3, g, x, x};
        if (W < w2) return {tn, 1, g, x, x};
        if (W < w3) return {tn, 2, g, x, z};
        return {tn, 0};  // null candidate: the clock still advances
    }

    Event apply(const Pending& p) {
        pop.set_time(p.t);
        Event ev{p.t,
                 p.kind == 1   ? EventKind::clonal_birth
                 : p.kind == 2 ? EventKind::mutant_birth
                               : EventKind::death,
                 p.parent, p.child};
        if (p.kind == 3) {
            const auto res = pop.remove_individual(p.group);
            Btot -= bc[p.group] * (affine ? 1.0 : 0.0);
            if (affine) ND0 -= d0c[p.group];
            nd[p.group] -= 1.0;
            if (affine) rb[p.group] -= bc[p.group];
            if (res.erased) cache_erase(p.group, res.moved_from);
            if (pop.count() == 0 && !extinction) extinction = p.t;
            ++stats.deaths;
        } else {
            const auto res = pop.add_individual(p.child);
            if (res.created) {
                cache_push(p.child);
            } else {
                nd[res.group] += 1.0;
                if (affine) {
                    rb[res.group] += bc[res.group];
                    Btot += bc[res.group];
                    ND0 += d0c[res.group];
                }
            }
            if (p.kind == 1)
                ++stats.clonal;
            else
                ++stats.mutant;
            if (pop.count() > opts.population_cap) {
                std::ostringstream os;
                os << "population count " << pop.count() << " exceeded the cap "
                   << opts.population_cap << " at t = " << p.t;
                throw PopulationExplosion(os.str());
            }
        }
        resweep();
        ++stats.events;
        stats.max_count = std::max(stats.max_count, pop.count());

        if (opts.refresh_every > 0 && ++since_refresh >= opts.refresh_every) {
            since_refresh = 0;
            pop.rebuild_sums();
            rebuild_caches();
        }
        if (opts.audit_every > 0 && ++since_audit >= opts.audit_every) {
            since_audit = 0;
            const double worst = pop.audit_sums();
            if (worst > opts.audit_tol) {
                std::ostringstream os;
                os << "cached interaction sums drifted from the direct recomputation by "
                   << worst << " (tolerance " << opts.audit_tol << ")";
                throw SimulationFault(os.str());
            }
        }
        return ev;
    }

    void run(double t_end, EngineKind kind, Recorder* recorder) {
        if (recorder) recorder->begin(pop, Btot, Dtot, base_minus(), pair_term());
        while (pop.time() < t_end) {
            const Pending p =
                kind == EngineKind::direct ? plan_direct(t_end) : plan_rejection(t_end);
            if (recorder) recorder->advance(p.t, pop, Btot, Dtot, base_minus(), pair_term());
            if (p.kind == 0) {
                pop.set_time(p.t);
                continue;
            }
            const Event ev = apply(p);
            if (recorder) recorder->record_event(ev);
        }
    }
};

Simulator::Simulator(const AppliedModel& applied, const std::vector<Atom>& init,
                     const SimOptions& opts)
    : impl_(std::make_unique<Impl>(applied, init, opts)) {}

Simulator::~Simulator() = default;

std::optional<Event> Simulator::step_direct(double t_end) {
    const Pending p = impl_->plan_direct(t_end);
    if (p.kind == 0) {
        impl_->pop.set_time(p.t);
        return std::nullopt;
    }
    return impl_->apply(p);
}

std::optional<Event> Simulator::step_rejection(double t_end) {
    const Pending p = impl_->plan_rejection(t_end);
    if (p.kind == 0) {
        impl_->pop.set_time(p.t);
        return std::nullopt;
    }
    return impl_->apply(p);
}

const Population& Simulator::population() const { return impl_->pop; }
const AppliedModel& Simulator::applied() const { return impl_->applied; }
Trajectory::Stats& Simulator::stats() { return impl_->stats; }
std::optional<double> Simulator::extinction_time() const { return impl_->extinction; }

void Simulator::run(double t_end, EngineKind kind, Recorder* recorder) {
    impl_->run(t_end, kind, recorder);
}

Trajectory simulate(const ModelSpec& model, const ScalingSpec& scaling,
                    const std::vector<Atom>& init, const SimOptions& opts,
                    const RecorderConfig& rec) {
    std::vector<std::string> warnings;
    if (opts.validate) {
        const ValidationReport r1 = validate_model(model);
        warnings.insert(warnings.end(), r1.warnings.begin(), r1.warnings.end());
        const ValidationReport r2 = validate_scaling(model, scaling);
        warnings.insert(warnings.end(), r2.warnings.begin(), r2.warnings.end());
    } else {
        warnings.emplace_back("validation skipped");
    }
    const AppliedModel am(model, scaling);
    Simulator sim(am, init, opts);
    Recorder recorder(sim.applied(), rec, opts.t_end);
    sim.run(opts.t_end, opts.engine, &recorder);
    return recorder.finish(sim.population(), opts, opts.engine, sim.stats(),
                           std::move(warnings), sim.extinction_time());
}

}  // namespace ecoevo
