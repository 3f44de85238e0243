#pragma once
// Mutation displacement law M(x, dz): the trait of a mutant child of a parent
// at x.  The rejection engine additionally needs a translation-invariant
// envelope density Mbar with M(x, x+h) <= C * Mbar(h) and a sampler for Mbar.

#include <functional>
#include <memory>

#include "ecoevo/common.hpp"
#include "ecoevo/rng.hpp"

namespace ecoevo {

struct TraitSpace {
    int dim = 1;           // only dim == 1 is implemented; validated at use
    double lo = 0.0;
    double hi = 1.0;
    bool bounded = true;   // unbounded spaces ignore lo/hi

    bool contains(double x) const { return !bounded || (x >= lo && x <= hi); }
    double width() const { return hi - lo; }
};

class MutationKernel {
public:
    /// Empty kernel; using it before assigning one of the factories throws.
    MutationKernel() = default;

    /// Gaussian step of width sigma conditioned on landing inside the trait
    /// space (normal law restricted and renormalized to [lo, hi]).
    static MutationKernel gaussian(TraitSpace space, double sigma);

    /// Fully custom kernel for tests.  `density` must be normalized in z for
    /// every x; `envelope_c * envelope_density(z - x)` must dominate it.
    static MutationKernel custom(std::function<double(Rng&, double)> sample,
                                 std::function<double(double, double)> density,
                                 std::function<double(double)> envelope_density,
                                 std::function<double(Rng&)> envelope_sample,
                                 double envelope_c);

    /// Child trait for a parent at x.
    double sample(Rng& rng, double x) const;

    /// Conditioned density M(x, z); zero outside the trait space.
    double density(double x, double z) const;

    /// Envelope density Mbar evaluated at displacement h.
    double envelope_density(double h) const;

    /// Displacement drawn from Mbar (not conditioned on the trait space).
    double sample_envelope(Rng& rng) const;

    /// Domination constant C.
    double envelope_c() const { return envelope_c_; }

    /// Gaussian kernels: probability that an unconditioned step from x stays
    /// inside the space (the normalization denominator).
    double containment_mass(double x) const;

    /// Copy with sigma multiplied by `factor`; only Gaussian kernels support
    /// factors != 1 (used by the accelerated small-mutation scaling).
    MutationKernel with_sigma_scaled(double factor) const;

    bool is_gaussian() const { return gaussian_; }
    double sigma() const { return sigma_; }

private:
    bool gaussian_ = false;
    TraitSpace space_{};
    double sigma_ = 0.0;
    double envelope_c_ = 1.0;
    std::function<double(Rng&, double)> sample_;
    std::function<double(double, double)> density_;
    std::function<double(double)> env_density_;
    std::function<double(Rng&)> env_sample_;
};

}  // namespace ecoevo
