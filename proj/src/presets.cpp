#include "ecoevo/presets.hpp"

#include <algorithm>
#include <cmath>

namespace ecoevo {

// ---------------------------------------------------------------------------
// model factories
// ---------------------------------------------------------------------------

ModelSpec kisdi_model(double sigma, double mu) {
    if (!(sigma > 0.0)) throw ConfigError("kisdi model needs sigma > 0");
    if (mu < 0.0 || mu > 1.0) throw ConfigError("kisdi model needs mu in [0, 1]");
    ModelSpec m;
    m.name = "kisdi";
    m.space = TraitSpace{1, 0.0, 4.0, true};
    m.birth = [](double x, double) { return 4.0 - x; };
    m.death = [](double, double zeta) { return zeta; };
    m.mu = [mu](double) { return mu; };
    m.U = sigmoid_kernel(2.0, 1.2, 4.0);
    m.V = constant_kernel(0.0);
    m.mutation = MutationKernel::gaussian(m.space, sigma);
    m.env.birth_max = 4.0;
    m.env.death_base = 0.0;
    m.env.death_slope = 1.0;
    m.env.turnover_max = 1.0;
    m.ll = LinearLogistic{[](double x) { return 4.0 - x; }, [](double) { return 0.0; },
                          [](double) { return 1.0; }};
    m.birth_uses_interaction = false;
    m.monotone = true;
    return m;
}

ModelSpec linear_logistic_model(double b0, double b1, double d0, double alpha, double u0,
                                double mu, double sigma, TraitSpace space) {
    if (!(sigma > 0.0)) throw ConfigError("linear-logistic model needs sigma > 0");
    if (mu < 0.0 || mu > 1.0) throw ConfigError("linear-logistic model needs mu in [0, 1]");
    if (alpha < 0.0) throw ConfigError("linear-logistic model needs alpha >= 0");
    if (u0 < 0.0) throw ConfigError("linear-logistic model needs u0 >= 0");
    auto bfun = [b0, b1](double x) { return std::max(0.0, b0 - b1 * x); };
    ModelSpec m;
    m.name = "linear-logistic";
    m.space = space;
    m.birth = [bfun](double x, double) { return bfun(x); };
    m.death = [d0, alpha](double, double zeta) { return d0 + alpha * zeta; };
    m.mu = [mu](double) { return mu; };
    m.U = constant_kernel(u0);
    m.V = constant_kernel(0.0);
    m.mutation = MutationKernel::gaussian(space, sigma);
    m.env.birth_max = std::max(bfun(space.lo), bfun(space.hi));
    m.env.death_base = d0;
    m.env.death_slope = alpha;
    m.env.turnover_max = 1.0;
    m.ll = LinearLogistic{bfun, [d0](double) { return d0; }, [alpha](double) { return alpha; }};
    m.birth_uses_interaction = false;
    // The monotone contract includes viability b(x, 0) > d(x, 0) everywhere.
    const double bmin = std::min(bfun(space.lo), bfun(space.hi));
    m.monotone = bmin > d0;
    return m;
}

ModelSpec yule_model(double b) {
    if (!(b > 0.0)) throw ConfigError("yule model needs a positive birth rate");
    ModelSpec m;
    m.name = "yule";
    m.space = TraitSpace{1, 0.0, 1.0, true};
    m.birth = [b](double, double) { return b; };
    m.death = [](double, double) { return 0.0; };
    m.mu = [](double) { return 0.0; };
    m.U = constant_kernel(0.0);
    m.V = constant_kernel(0.0);
    m.mutation = MutationKernel::gaussian(m.space, 0.05);
    m.env.birth_max = b;
    m.env.death_base = 0.0;
    m.env.death_slope = 0.0;
    m.env.turnover_max = 1.0;
    m.ll = LinearLogistic{[b](double) { return b; }, [](double) { return 0.0; },
                          [](double) { return 0.0; }};
    m.birth_uses_interaction = false;
    m.monotone = true;
    return m;
}

// ---------------------------------------------------------------------------
// named presets
// ---------------------------------------------------------------------------

namespace {

struct NamedPreset {
    const char* name;
    const char* text;
};

// Horizons are ours (captions do not give them); everything else follows the
// figure captions.  All start monomorphic at x0 = 1.2 with K individuals.
const NamedPreset kPresets[] = {
    {"kisdi-base", R"(# asymmetric competition, baseline capacity run
[model]
preset = kisdi
sigma = 0.1
mu = 0.03
[scaling]
mode = capacity
K = 1000
[run]
engine = direct
t_end = 200
seed = 100
init = monomorphic
x0 = 1.2
[output]
bins = 200
snapshot_dt = 1
mass_dt = 0.1
)"},
    {"fig1a", R"(# small system: noisy branching
[model]
preset = kisdi
sigma = 0.1
mu = 0.03
[scaling]
mode = capacity
K = 100
[run]
engine = direct
t_end = 500
seed = 101
init = monomorphic
x0 = 1.2
[output]
bins = 200
snapshot_dt = 1
mass_dt = 0.5
)"},
    {"fig1b", R"(# medium system: clearer branches
[model]
preset = kisdi
sigma = 0.1
mu = 0.03
[scaling]
mode = capacity
K = 3000
[run]
engine = direct
t_end = 500
seed = 102
init = monomorphic
x0 = 1.2
[output]
bins = 200
snapshot_dt = 1
mass_dt = 0.5
)"},
    {"fig1c", R"(# large system: smooth density evolving regularly
[model]
preset = kisdi
sigma = 0.1
mu = 0.03
[scaling]
mode = capacity
K = 100000
[run]
engine = direct
t_end = 100
seed = 103
init = monomorphic
x0 = 1.2
[output]
bins = 200
snapshot_dt = 1
mass_dt = 0.5
)"},
    {"fig1d", R"(# tiny mutation probability: jump-like substitution path
[model]
preset = kisdi
sigma = 0.1
mu = 0.00001
[scaling]
mode = capacity
K = 3000
[run]
engine = direct
t_end = 3000
seed = 104
init = monomorphic
x0 = 1.2
[output]
bins = 200
snapshot_dt = 10
mass_dt = 5
)"},
    {"fig2a", R"(# accelerated turnover, eta = 1/2, rescaled mutation step
[model]
preset = kisdi
sigma = 0.3
mu = 0.3
[scaling]
mode = accel-gauss
K = 10000
eta = 0.5
[run]
engine = direct
t_end = 100
seed = 105
init = monomorphic
x0 = 1.2
[output]
bins = 200
snapshot_dt = 0.5
mass_dt = 0.25
)"},
    {"fig2b", R"(# accelerated turnover, eta = 1/2, rescaled mutation probability
[model]
preset = kisdi
sigma = 0.1
mu = 0.1
[scaling]
mode = accel-rare
K = 10000
eta = 0.5
[run]
engine = direct
t_end = 100
seed = 106
init = monomorphic
x0 = 1.2
[output]
bins = 200
snapshot_dt = 0.5
mass_dt = 0.25
)"},
    {"fig2c", R"(# limit acceleration eta = 1: finely branched, strongly fluctuating
[model]
preset = kisdi
sigma = 0.3
mu = 0.3
[scaling]
mode = accel-gauss
K = 10000
eta = 1
[run]
engine = direct
t_end = 50
seed = 107
init = monomorphic
x0 = 1.2
[output]
bins = 200
snapshot_dt = 0.25
mass_dt = 0.1
)"},
    {"fig2d", R"(# second sample of the eta = 1 limit regime
[model]
preset = kisdi
sigma = 0.3
mu = 0.3
[scaling]
mode = accel-gauss
K = 10000
eta = 1
[run]
engine = direct
t_end = 50
seed = 108
init = monomorphic
x0 = 1.2
[output]
bins = 200
snapshot_dt = 0.25
mass_dt = 0.1
)"},
};

}  // namespace

std::string preset_text(const std::string& name) {
    for (const NamedPreset& p : kPresets)
        if (name == p.name) return p.text;
    std::string known;
    for (const NamedPreset& p : kPresets) {
        if (!known.empty()) known += ", ";
        known += p.name;
    }
    throw ConfigError("unknown preset '" + name + "' (available: " + known + ")");
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const NamedPreset& p : kPresets) out.emplace_back(p.name);
    return out;
}

// ---------------------------------------------------------------------------
// configured run assembly
// ---------------------------------------------------------------------------

ModelSpec build_model(ExperimentConfig& cfg) {
    const std::string preset = cfg.get_string("model", "preset");
    if (preset == "kisdi") {
        const double sigma = cfg.get_double("model", "sigma");
        const double mu = cfg.get_double("model", "mu");
        return kisdi_model(sigma, mu);
    }
    if (preset == "linear-logistic") {
        TraitSpace space{1, cfg.get_double("model", "box_lo", 0.0),
                         cfg.get_double("model", "box_hi", 1.0), true};
        return linear_logistic_model(
            cfg.get_double("model", "b0"), cfg.get_double("model", "b1", 0.0),
            cfg.get_double("model", "d0"), cfg.get_double("model", "alpha"),
            cfg.get_double("model", "u0", 1.0), cfg.get_double("model", "mu", 0.0),
            cfg.get_double("model", "sigma", 0.05), space);
    }
    if (preset == "yule") return yule_model(cfg.get_double("model", "b"));
    throw ConfigError("unknown model preset '" + preset +
                      "' (available: kisdi, linear-logistic, yule)");
}

RunSetup build_run(ExperimentConfig& cfg) {
    RunSetup setup;
    setup.model = build_model(cfg);
    setup.model_name = setup.model.name;

    setup.scaling.mode = scaling_mode_from_string(cfg.get_string("scaling", "mode", "capacity"));
    setup.scaling.K = cfg.get_double("scaling", "K", 1.0);
    if (cfg.has("scaling", "eta")) setup.scaling.eta = cfg.get_double("scaling", "eta");
    if (cfg.has("scaling", "u_K")) setup.scaling.u_K = cfg.get_double("scaling", "u_K");

    setup.sim.engine = engine_from_string(cfg.get_string("run", "engine", "direct"));
    setup.sim.t_end = cfg.get_double("run", "t_end");
    setup.sim.seed = cfg.get_seed();
    setup.sim.population_cap = cfg.get_int("run", "population_cap", 10'000'000);
    setup.sim.audit_every =
        static_cast<std::uint64_t>(cfg.get_int("run", "audit_every", 0));
    setup.sim.refresh_every =
        static_cast<std::uint64_t>(cfg.get_int("run", "refresh_every", 4'000'000));
    setup.sim.validate = cfg.get_bool("run", "validate", true);
    setup.replicates = static_cast<int>(cfg.get_int("run", "replicates", 1));
    setup.workers = static_cast<int>(cfg.get_int("run", "workers", 1));
    if (setup.replicates < 1) throw ConfigError("[run] replicates must be >= 1");
    if (setup.workers < 1) throw ConfigError("[run] workers must be >= 1");

    const std::string init = cfg.get_string("run", "init", "monomorphic");
    const double x0 = cfg.get_double("run", "x0", 1.2);
    if (init == "monomorphic") {
        const long long n0 = cfg.get_int("run", "n0", std::llround(setup.scaling.K));
        if (n0 < 1) throw ConfigError("[run] n0 must be >= 1");
        setup.init = {{x0, n0}};
    } else if (init == "dimorphic") {
        const double x1 = cfg.get_double("run", "x1");
        const long long n0 = cfg.get_int("run", "n0", std::llround(setup.scaling.K));
        const long long n1 = cfg.get_int("run", "n1", 1);
        if (n0 < 1 || n1 < 1) throw ConfigError("[run] initial counts must be >= 1");
        setup.init = {{x0, n0}, {x1, n1}};
    } else {
        throw ConfigError("[run] init must be 'monomorphic' or 'dimorphic', got '" + init + "'");
    }

    setup.rec.bins = static_cast<int>(cfg.get_int("output", "bins", 200));
    setup.rec.snapshot_dt = cfg.get_double("output", "snapshot_dt", 1.0);
    setup.rec.mass_dt = cfg.get_double("output", "mass_dt", 0.1);
    setup.rec.log_events = cfg.get_bool("output", "events", false);
    setup.rec.affine_terms = setup.model.ll.has_value();
    if (cfg.has("output", "hist_lo") || cfg.has("output", "hist_hi"))
        setup.rec.hist_range = {cfg.get_double("output", "hist_lo"),
                                cfg.get_double("output", "hist_hi")};
    setup.renormalize = cfg.get_bool("output", "renormalize", true);
    return setup;
}

}  // namespace ecoevo
