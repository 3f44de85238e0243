#include <cmath>
#include <sstream>

#include "ecoevo/model.hpp"
#include "ecoevo/numerics.hpp"
#include "ecoevo/rng.hpp"

namespace ecoevo {

namespace {

std::string point(const char* what, double a, double b, double got, double bound) {
    std::ostringstream os;
    os << what << " at (" << a << ", " << b << "): value " << got << " exceeds bound " << bound;
    return os.str();
}

[[noreturn]] void hard(const std::string& msg, const std::string& witness) {
    throw ValidationError(true, "model validation failed: " + msg, witness);
}

double probe_trait(const TraitSpace& s, Rng& rng) {
    if (s.bounded) return s.lo + (s.hi - s.lo) * rng.uniform();
    return 100.0 * (2.0 * rng.uniform() - 1.0);
}

}  // namespace

ValidationReport validate_model(const ModelSpec& model, const ValidationOptions& opts) {
    ValidationReport rep;
    const TraitSpace& space = model.space;
    if (space.dim != 1)
        hard("only one-dimensional trait spaces are implemented", "dim");
    if (space.bounded && !(space.lo < space.hi))
        hard("trait space bounds must satisfy lo < hi", "space");
    if (!model.birth || !model.death || !model.mu)
        hard("birth, death and mutation-probability functions must all be set", "functions");
    if (!model.U || !model.V) hard("both interaction kernels must be set", "kernels");

    const double tol = 1e-9;
    Rng rng(opts.probe_seed);
    for (int p = 0; p < opts.probes; ++p) {
        const double x = probe_trait(space, rng);
        const double u = rng.uniform();
        const double zeta = u * u * opts.zeta_max;  // denser near zero

        const double b = model.birth(x, zeta);
        if (!(b >= 0.0)) hard("birth rate negative or NaN", point("b", x, zeta, b, 0.0));
        if (b > model.env.birth_max * (1.0 + tol) + tol)
            hard("birth rate above its envelope", point("b", x, zeta, b, model.env.birth_max));

        const double d = model.death(x, zeta);
        const double dbound = model.env.death_base + model.env.death_slope * zeta;
        if (!(d >= 0.0)) hard("death rate negative or NaN", point("d", x, zeta, d, 0.0));
        if (d > dbound * (1.0 + tol) + tol)
            hard("death rate above its affine envelope", point("d", x, zeta, d, dbound));

        const double m = model.mu(x);
        if (!(m >= 0.0 && m <= 1.0))
            hard("mutation probability outside [0, 1]", point("mu", x, 0.0, m, 1.0));

        // Kernel bounds probed on displacements realizable inside the space.
        const double h = x - probe_trait(space, rng);
        const double kv = (*model.U)(h);
        if (!(kv >= 0.0) || kv > model.U->bound() * (1.0 + tol) + tol)
            hard("competition kernel outside [0, bound]", point("U", h, 0.0, kv, model.U->bound()));
        const double vv = (*model.V)(h);
        if (!(vv >= 0.0) || vv > model.V->bound() * (1.0 + tol) + tol)
            hard("birth kernel outside [0, bound]", point("V", h, 0.0, vv, model.V->bound()));

        // Mutation envelope domination at a displacement drawn from the
        // envelope itself (covers the region the rejection sampler visits).
        const double step = model.mutation.sample_envelope(rng);
        const double dens = model.mutation.density(x, x + step);
        const double env = model.mutation.envelope_c() * model.mutation.envelope_density(step);
        if (dens > env * (1.0 + 1e-7) + 1e-300)
            hard("mutation density above its envelope", point("M", x, x + step, dens, env));

        if (model.ll) {
            const LinearLogistic& ll = *model.ll;
            const double scale = 1.0 + std::abs(b) + std::abs(d);
            if (std::abs(b - ll.b0(x)) > 1e-9 * scale)
                hard("affine coefficients disagree with the birth closure",
                     point("b-b0", x, zeta, b, ll.b0(x)));
            if (std::abs(d - (ll.d0(x) + ll.alpha(x) * zeta)) > 1e-9 * scale)
                hard("affine coefficients disagree with the death closure",
                     point("d-d0-alpha*zeta", x, zeta, d, ll.d0(x) + ll.alpha(x) * zeta));
        }
        if (model.monotone) {
            const double zeta2 = 2.0 * zeta + 1.0;
            if (model.birth(x, zeta2) > b + tol)
                hard("birth rate increases with competition despite the monotone flag",
                     point("b-monotone", x, zeta2, model.birth(x, zeta2), b));
            if (model.death(x, zeta2) + tol < d)
                hard("death rate decreases with competition despite the monotone flag",
                     point("d-monotone", x, zeta2, model.death(x, zeta2), d));
            if (model.birth(x, 0.0) <= model.death(x, 0.0))
                hard("population not viable at zero competition despite the monotone flag",
                     point("viability", x, 0.0, model.birth(x, 0.0), model.death(x, 0.0)));
        }
        ++rep.probes;
    }

    // Kernel normalization: integral of M(x, .) over the reachable range.
    for (int i = 0; i < opts.mass_checks; ++i) {
        const double x = space.bounded
                             ? space.lo + (space.hi - space.lo) * i / std::max(1, opts.mass_checks - 1)
                             : -10.0 + 20.0 * i / std::max(1, opts.mass_checks - 1);
        double lo, hi;
        if (space.bounded) {
            lo = space.lo;
            hi = space.hi;
        } else if (model.mutation.is_gaussian()) {
            lo = x - 12.0 * model.mutation.sigma();
            hi = x + 12.0 * model.mutation.sigma();
        } else {
            lo = x - 100.0;
            hi = x + 100.0;
        }
        double mass;
        try {
            mass = integrate([&](double z) { return model.mutation.density(x, z); }, lo, hi,
                             opts.quad_tol);
        } catch (const QuadratureFailure& e) {
            throw ValidationError(false, std::string("mutation-kernel quadrature failed: ") + e.what(),
                                  "x=" + std::to_string(x));
        }
        rep.worst_mass_deviation = std::max(rep.worst_mass_deviation, std::abs(mass - 1.0));
        if (std::abs(mass - 1.0) > opts.mass_tol)
            throw ValidationError(false,
                                  "mutation kernel is not normalized: integral " +
                                      std::to_string(mass) + " at x = " + std::to_string(x),
                                  "x=" + std::to_string(x));
    }
    return rep;
}

ValidationReport validate_scaling(const ModelSpec& model, const ScalingSpec& scaling,
                                  const ValidationOptions& opts) {
    ValidationReport rep;
    if (scaling.K < 1.0) throw ConfigError("carrying capacity K must be >= 1");
    if (scaling.mode == ScalingMode::none && scaling.K != 1.0)
        throw ConfigError("scaling mode 'none' fixes K = 1");
    const bool accel =
        scaling.mode == ScalingMode::accel_gauss || scaling.mode == ScalingMode::accel_rare;
    if (accel) {
        if (!(scaling.eta > 0.0 && scaling.eta <= 1.0))
            throw ConfigError("acceleration exponent eta must lie in (0, 1]");
        if (scaling.mode == ScalingMode::accel_gauss && !model.mutation.is_gaussian())
            throw ConfigError("accel-gauss scaling needs a Gaussian mutation kernel");
        Rng rng(opts.probe_seed);
        for (int p = 0; p < 256; ++p) {
            const double x = probe_trait(model.space, rng);
            const double r = scaling.r ? scaling.r(x) : 1.0;
            if (!(r >= 0.0) || r > model.env.turnover_max * (1.0 + 1e-9))
                hard("turnover profile outside [0, bound]", point("r", x, 0.0, r, model.env.turnover_max));
        }
    }
    if (scaling.mode == ScalingMode::tss_rare) {
        if (!(scaling.u_K > 0.0 && scaling.u_K <= 1.0))
            throw ConfigError("rare-mutation factor u_K must lie in (0, 1]");
        const double window = scaling.K * scaling.u_K * std::log(std::max(scaling.K, 2.0));
        if (window > 0.1) {
            std::ostringstream os;
            os << "weak timescale separation: K*u_K*log(K) = " << window
               << " (> 0.1); the substitution-sequence limit may be inaccurate";
            rep.warnings.push_back(os.str());
        }
    }
    return rep;
}

}  // namespace ecoevo
