#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "ecoevo/common.hpp"
#include "ecoevo/engine.hpp"
#include "ecoevo/ensemble.hpp"
#include "ecoevo/presets.hpp"
#include "ecoevo/stats.hpp"
#include "support/toy.hpp"

using namespace ecoevo;

namespace {

SimOptions opts_for(EngineKind engine, double t_end, std::uint64_t seed) {
    SimOptions o;
    o.engine = engine;
    o.t_end = t_end;
    o.seed = seed;
    return o;
}

}  // namespace

// ---- cached rate evaluation ----

TEST_CASE("per-group rates of a singleton include the self term") {
    ModelSpec m = kisdi_model(0.1, 0.0);
    AppliedModel a(m, {ScalingMode::capacity, 100.0});
    Population pop(a, {{1.2, 1}});
    RateTable rt = eval_rates(pop);
    REQUIRE(rt.birth.size() == 1);
    // d = zeta_U = U(0) / K even for a population of one.
    CHECK(rt.death[0] == doctest::Approx(12.0 / 11.0 / 100.0).epsilon(1e-13));
    CHECK(rt.birth[0] == doctest::Approx(2.8).epsilon(1e-14));
    CHECK(rt.total_birth == doctest::Approx(2.8).epsilon(1e-14));
    CHECK(rt.total_death == doctest::Approx(0.0109090909090909).epsilon(1e-12));
}

TEST_CASE("per-group rates mix both trait groups through the kernel") {
    ModelSpec m = kisdi_model(0.1, 0.0);
    AppliedModel a(m, {ScalingMode::capacity, 100.0});
    Population pop(a, {{1.2, 100}, {1.3, 50}});
    RateTable rt = eval_rates(pop);
    REQUIRE(rt.death.size() == 2);
    const double u0 = 12.0 / 11.0;
    const double u_up = 0.891588520642899334;   // U(+0.1): influence of 1.2 on 1.3
    const double u_dn = 1.283202842789970048;   // U(-0.1): influence of 1.3 on 1.2
    CHECK(rt.sum_u[0] == doctest::Approx((u0 * 100 + u_dn * 50) / 100.0).epsilon(1e-12));
    CHECK(rt.sum_u[1] == doctest::Approx((u_up * 100 + u0 * 50) / 100.0).epsilon(1e-12));
    CHECK(rt.death[0] == doctest::Approx(rt.sum_u[0]).epsilon(1e-14));
    CHECK(rt.birth[0] == doctest::Approx(2.8).epsilon(1e-14));
    CHECK(rt.birth[1] == doctest::Approx(2.7).epsilon(1e-14));
    CHECK(rt.total_death ==
          doctest::Approx(100 * rt.death[0] + 50 * rt.death[1]).epsilon(1e-12));
}

TEST_CASE("population bookkeeping survives adds, removes and audits") {
    ModelSpec m = kisdi_model(0.1, 0.0);
    AppliedModel a(m, {ScalingMode::capacity, 50.0});
    Population pop(a, {{1.0, 10}, {2.0, 5}});
    Rng rng(5);
    for (int i = 0; i < 300; ++i) {
        if (rng.uniform() < 0.55) {
            pop.add_individual(4.0 * rng.uniform());
        } else if (pop.count() > 1) {
            pop.remove_individual(static_cast<std::size_t>(rng.below(pop.group_count())));
        }
        REQUIRE(pop.audit_sums() < 1e-9);
    }
    long long total = 0;
    for (std::size_t g = 0; g < pop.group_count(); ++g) total += pop.multiplicity(g);
    CHECK(total == pop.count());
    CHECK_THROWS_AS(eval_rates(pop, static_cast<long long>(pop.group_count())), IndexOutOfRange);
}

// ---- determinism and reproducibility ----

TEST_CASE("identical seeds reproduce a trajectory bit for bit") {
    ModelSpec m = kisdi_model(0.1, 0.05);
    ScalingSpec sc{ScalingMode::capacity, 60.0};
    std::vector<Atom> init = {{1.2, 60}};
    RecorderConfig rec;
    rec.log_events = true;
    rec.mass_dt = 0.5;
    for (EngineKind kind : {EngineKind::direct, EngineKind::rejection}) {
        Trajectory a = simulate(m, sc, init, opts_for(kind, 8.0, 31337), rec);
        Trajectory b = simulate(m, sc, init, opts_for(kind, 8.0, 31337), rec);
        CHECK(a.mass == b.mass);
        CHECK(a.stats.events == b.stats.events);
        REQUIRE(a.events.size() == b.events.size());
        for (std::size_t i = 0; i < a.events.size(); ++i) {
            CHECK(a.events[i].time == b.events[i].time);
            CHECK(a.events[i].child_trait == b.events[i].child_trait);
        }
        Trajectory c = simulate(m, sc, init, opts_for(kind, 8.0, 31338), rec);
        CHECK(a.mass != c.mass);
    }
}

TEST_CASE("replicate ensembles are invariant under the worker count") {
    ModelSpec m = kisdi_model(0.1, 0.03);
    ScalingSpec sc{ScalingMode::capacity, 30.0};
    auto run_with = [&](int workers) {
        std::vector<double> finals(16, 0.0);
        run_ensemble(
            16, workers,
            [&](int r, std::uint64_t seed) {
                SimOptions o = opts_for(EngineKind::direct, 5.0, seed);
                o.validate = false;
                Trajectory tr = simulate(m, sc, {{1.2, 30}}, o);
                finals[static_cast<std::size_t>(r)] = tr.mass.back();
            },
            777);
        return finals;
    };
    CHECK(run_with(1) == run_with(3));
}

// ---- event accounting and recorder cadences ----

TEST_CASE("event log balances the population count") {
    ModelSpec m = kisdi_model(0.1, 0.1);
    ScalingSpec sc{ScalingMode::capacity, 50.0};
    RecorderConfig rec;
    rec.log_events = true;
    Trajectory tr = simulate(m, sc, {{1.2, 50}}, opts_for(EngineKind::direct, 30.0, 4242), rec);
    CHECK(tr.stats.events == tr.events.size());
    CHECK(tr.stats.events == tr.stats.clonal + tr.stats.mutant + tr.stats.deaths);
    long long count = 50;
    double prev = 0.0;
    long long running_max = count;
    for (const Event& ev : tr.events) {
        REQUIRE(ev.time >= prev);
        REQUIRE(ev.time <= 30.0);
        prev = ev.time;
        count += ev.kind == EventKind::death ? -1 : 1;
        running_max = std::max(running_max, count);
        if (ev.kind != EventKind::mutant_birth) CHECK(ev.child_trait == ev.parent_trait);
    }
    long long final_count = 0;
    for (const Atom& at : tr.final_atoms) final_count += at.n;
    CHECK(final_count == count);
    CHECK(tr.stats.max_count == running_max);
    CHECK(tr.stats.mutant > 0);  // mu = 0.1 over 30 time units must mutate
}

TEST_CASE("recorder cadences are exact arithmetic progressions") {
    ModelSpec m = kisdi_model(0.1, 0.0);
    ScalingSpec sc{ScalingMode::capacity, 40.0};
    RecorderConfig rec;
    rec.mass_dt = 0.25;
    rec.snapshot_dt = 2.0;
    rec.bins = 64;
    SimOptions o = opts_for(EngineKind::direct, 10.0, 5);
    Trajectory tr = simulate(m, sc, {{1.2, 40}}, o, rec);
    REQUIRE(tr.mass_times.size() == 41);
    for (std::size_t i = 0; i < tr.mass_times.size(); ++i)
        CHECK(tr.mass_times[i] == doctest::Approx(0.25 * i).epsilon(1e-12));
    REQUIRE(tr.snap_times.size() == 6);
    REQUIRE(tr.histogram.size() == 6);
    REQUIRE(tr.bin_edges.size() == 65);
    CHECK(tr.bin_edges.front() == 0.0);
    CHECK(tr.bin_edges.back() == 4.0);
    // Every trait lies inside the space, so each histogram row carries the
    // full population mass at its snapshot time.
    for (std::size_t s = 0; s < tr.histogram.size(); ++s) {
        double row = 0.0;
        for (double v : tr.histogram[s]) row += v;
        const auto it = std::find_if(tr.mass_times.begin(), tr.mass_times.end(), [&](double t) {
            return std::abs(t - tr.snap_times[s]) < 1e-12;
        });
        REQUIRE(it != tr.mass_times.end());
        CHECK(row == doctest::Approx(tr.mass[static_cast<std::size_t>(
                         it - tr.mass_times.begin())]).epsilon(1e-12));
    }
}

TEST_CASE("compensator and bracket of the mass are exact on a pure birth process") {
    ModelSpec m = yule_model(0.3);
    ScalingSpec sc{ScalingMode::none, 1.0};
    RecorderConfig rec;
    rec.log_events = true;
    rec.mass_dt = 0.5;
    Trajectory tr = simulate(m, sc, {{0.5, 5}}, opts_for(EngineKind::direct, 6.0, 97), rec);
    // Reconstruct integral of 0.3 * I(s) ds from the event log; births are the
    // only events so I is a step function increasing by one at each time.
    for (std::size_t i = 0; i < tr.mass_times.size(); ++i) {
        const double t = tr.mass_times[i];
        double integral = 0.0;
        double prev = 0.0;
        long long count = 5;
        for (const Event& ev : tr.events) {
            if (ev.time > t) break;
            integral += count * (ev.time - prev);
            prev = ev.time;
            ++count;
        }
        integral += count * (t - prev);
        integral *= 0.3;
        CHECK(tr.mass[i] == doctest::Approx(static_cast<double>(count)).epsilon(1e-12));
        CHECK(tr.drift1[i] == doctest::Approx(integral).epsilon(1e-10));
        CHECK(tr.bracket1[i] == doctest::Approx(integral).epsilon(1e-10));
    }
}

TEST_CASE("affine death split is recorded for affine models") {
    TraitSpace space{1, 0.0, 1.0, true};
    ModelSpec m = linear_logistic_model(2.0, 0.0, 0.5, 1.0, 1.0, 0.0, 0.05, space);
    ScalingSpec sc{ScalingMode::capacity, 80.0};
    RecorderConfig rec;
    rec.affine_terms = true;
    rec.mass_dt = 0.2;
    Trajectory tr = simulate(m, sc, {{0.5, 80}}, opts_for(EngineKind::direct, 6.0, 12), rec);
    REQUIRE(tr.pair_term.size() == tr.mass.size());
    REQUIRE(tr.base_term.size() == tr.mass.size());
    // With U identically 1 the competition death term is alpha * I^2 / K and
    // the base split is birth minus baseline death, (b0 - d0) * I.
    for (std::size_t i = 0; i < tr.mass.size(); ++i) {
        const double I = tr.mass[i];
        CHECK(tr.pair_term[i] == doctest::Approx(I * I / 80.0).epsilon(1e-11));
        CHECK(tr.base_term[i] == doctest::Approx(1.5 * I).epsilon(1e-11));
    }
}

// ---- renormalization ----

TEST_CASE("renormalization rescales mass, histogram and accumulators once") {
    ModelSpec m = kisdi_model(0.1, 0.0);
    ScalingSpec sc{ScalingMode::capacity, 100.0};
    RecorderConfig rec;
    rec.affine_terms = false;
    Trajectory raw = simulate(m, sc, {{1.2, 100}}, opts_for(EngineKind::direct, 5.0, 3), rec);
    REQUIRE_FALSE(raw.renormalized);
    Trajectory scaled = raw;
    renormalize(scaled);
    CHECK(scaled.renormalized);
    for (std::size_t i = 0; i < raw.mass.size(); ++i) {
        CHECK(scaled.mass[i] == doctest::Approx(raw.mass[i] / 100.0).epsilon(1e-14));
        CHECK(scaled.drift1[i] == doctest::Approx(raw.drift1[i] / 100.0).epsilon(1e-14));
        CHECK(scaled.bracket1[i] == doctest::Approx(raw.bracket1[i] / 10000.0).epsilon(1e-14));
    }
    for (std::size_t s = 0; s < raw.histogram.size(); ++s)
        for (std::size_t b = 0; b < raw.histogram[s].size(); ++b)
            CHECK(scaled.histogram[s][b] ==
                  doctest::Approx(raw.histogram[s][b] / 100.0).epsilon(1e-14));
    CHECK_THROWS_AS(renormalize(scaled), AlreadyRenormalized);
}

// ---- failure paths ----

TEST_CASE("population explosion raises a fault at the configured cap") {
    ModelSpec m = yule_model(1.0);
    ScalingSpec sc{ScalingMode::none, 1.0};
    SimOptions o = opts_for(EngineKind::direct, 1e6, 8);
    o.population_cap = 2000;
    CHECK_THROWS_AS(simulate(m, sc, {{0.5, 1000}}, o), PopulationExplosion);
}

TEST_CASE("a death rate above the declared envelope trips the rejection sampler") {
    // The death closure uses slope 10 while the envelope declares slope 1, so
    // acceptance ratios leave [0, 1] immediately.
    ModelSpec m;
    m.name = "lying-envelope";
    m.space = TraitSpace{1, 0.0, 1.0, true};
    m.birth = [](double, double) { return 0.0; };
    m.death = [](double, double zeta) { return 0.1 + 10.0 * zeta; };
    m.mu = [](double) { return 0.0; };
    m.U = constant_kernel(1.0);
    m.V = constant_kernel(0.0);
    m.mutation = MutationKernel::gaussian(m.space, 0.05);
    m.env.birth_max = 0.0;
    m.env.death_base = 0.1;
    m.env.death_slope = 1.0;
    m.birth_uses_interaction = false;
    SimOptions o = opts_for(EngineKind::rejection, 50.0, 21);
    o.validate = false;  // validation would catch the lie before the run
    CHECK_THROWS_AS(simulate(m, {ScalingMode::none, 1.0}, {{0.5, 5}}, o), EnvelopeBreach);
}

TEST_CASE("skipping validation leaves a warning on the trajectory") {
    ModelSpec m = kisdi_model(0.1, 0.0);
    SimOptions o = opts_for(EngineKind::direct, 0.5, 2);
    o.validate = false;
    Trajectory tr = simulate(m, {ScalingMode::capacity, 20.0}, {{1.2, 20}}, o);
    REQUIRE_FALSE(tr.warnings.empty());
    CHECK(tr.warnings[0].find("validation") != std::string::npos);
}

TEST_CASE("extinction is recorded and the population stays extinct") {
    ModelSpec m = toy::pure_death_model(1.0);
    ScalingSpec sc{ScalingMode::none, 1.0};
    RecorderConfig rec;
    rec.mass_dt = 0.5;
    Trajectory tr = simulate(m, sc, {{0.5, 3}}, opts_for(EngineKind::direct, 40.0, 17), rec);
    REQUIRE(tr.extinction_time.has_value());
    CHECK(*tr.extinction_time < 40.0);
    CHECK(tr.mass.back() == 0.0);
    CHECK(tr.final_atoms.empty());
    for (std::size_t i = 0; i < tr.mass_times.size(); ++i)
        if (tr.mass_times[i] > *tr.extinction_time) CHECK(tr.mass[i] == 0.0);
}

TEST_CASE("cache audits pass on both engines") {
    ModelSpec m = kisdi_model(0.1, 0.03);
    SimOptions o = opts_for(EngineKind::direct, 20.0, 55);
    o.audit_every = 200;
    o.audit_tol = 1e-9;
    CHECK_NOTHROW(simulate(m, {ScalingMode::capacity, 200.0}, {{1.2, 200}}, o));
    SimOptions orj = opts_for(EngineKind::rejection, 4.0, 56);
    orj.audit_every = 100;
    Trajectory tr = simulate(m, {ScalingMode::capacity, 25.0}, {{1.2, 25}}, orj);
    CHECK(tr.stats.worst_acceptance <= 1.0 + 1e-9);
    CHECK(tr.stats.candidates > tr.stats.events);
}

// ---- cross-engine and oracle agreement in law ----

TEST_CASE("transient oracle reproduces the pure-death closed form") {
    // Survival of each individual is Bernoulli(exp(-t)), so the count is
    // binomial; this pins the uniformization reference itself.
    const int n0 = 20;
    ctmc::Chain chain = toy::pure_death_chain(1.0, n0);
    std::vector<double> p0(static_cast<std::size_t>(n0 + 1), 0.0);
    p0[n0] = 1.0;
    const double t = 0.7;
    std::vector<double> p = ctmc::transient(chain, p0, t);
    const double surv = std::exp(-t);
    double binom = std::pow(1.0 - surv, n0);  // k = 0 term, then recurrence
    for (int k = 0; k <= n0; ++k) {
        CHECK(p[static_cast<std::size_t>(k)] == doctest::Approx(binom).epsilon(1e-9));
        binom *= surv / (1.0 - surv) * (n0 - k) / (k + 1.0);
    }
    // Semigroup property: evolving 0.4 then 0.3 equals evolving 0.7.
    std::vector<double> q = ctmc::transient(chain, ctmc::transient(chain, p0, 0.4), 0.3);
    for (std::size_t k = 0; k < p.size(); ++k)
        CHECK(q[k] == doctest::Approx(p[k]).epsilon(1e-8));
}

TEST_CASE("both engines agree with the pure-death law") {
    ModelSpec m = toy::pure_death_model(1.0);
    ScalingSpec sc{ScalingMode::none, 1.0};
    const int n0 = 20;
    const double t = 0.7;
    ctmc::Chain chain = toy::pure_death_chain(1.0, n0);
    std::vector<double> p0(static_cast<std::size_t>(n0 + 1), 0.0);
    p0[n0] = 1.0;
    std::vector<double> ref = ctmc::transient(chain, p0, t);

    for (EngineKind kind : {EngineKind::direct, EngineKind::rejection}) {
        std::vector<long long> counts(static_cast<std::size_t>(n0 + 1), 0);
        const int reps = 4000;
        AppliedModel applied(m, sc);
        for (int r = 0; r < reps; ++r) {
            SimOptions o = opts_for(kind, t, derive_stream(314, static_cast<std::uint64_t>(r)));
            Simulator sim(applied, {{0.5, n0}}, o);
            for (;;) {
                auto ev = kind == EngineKind::direct ? sim.step_direct(t) : sim.step_rejection(t);
                if (!ev && sim.population().time() >= t) break;
                if (sim.population().count() == 0) break;
            }
            ++counts[static_cast<std::size_t>(sim.population().count())];
        }
        CHECK(toy::tv_distance(counts, ref) < 0.025);
    }
}

TEST_CASE("direct and rejection engines agree in distribution on the full model") {
    ModelSpec m = kisdi_model(0.1, 0.05);
    ScalingSpec sc{ScalingMode::capacity, 10.0};
    const int reps = 1200;
    std::vector<double> direct_final(reps), rejection_final(reps);
    AppliedModel applied(m, sc);
    for (int r = 0; r < reps; ++r) {
        for (EngineKind kind : {EngineKind::direct, EngineKind::rejection}) {
            SimOptions o = opts_for(kind, 3.0, derive_stream(kind == EngineKind::direct ? 1000 : 2000,
                                                             static_cast<std::uint64_t>(r)));
            o.validate = false;
            Trajectory tr = simulate(m, sc, {{1.2, 26}}, o);
            (kind == EngineKind::direct ? direct_final : rejection_final)[static_cast<std::size_t>(r)] =
                tr.mass.back();
        }
    }
    CHECK(ks_two_sample_p(direct_final, rejection_final) > 1e-4);
}
