#include "ecoevo/mutation.hpp"

#include <algorithm>
#include <cmath>

#include "ecoevo/numerics.hpp"

namespace ecoevo {

MutationKernel MutationKernel::gaussian(TraitSpace space, double sigma) {
    if (sigma <= 0.0) throw Error("mutation sigma must be positive");
    MutationKernel k;
    k.gaussian_ = true;
    k.space_ = space;
    k.sigma_ = sigma;
    if (space.bounded) {
        // Domination constant: the conditioned density is phi(z - x) / mass(x),
        // so C = 1 / min_x mass(x).  The containment mass is concave in x with
        // its minimum at an edge of the interval, but a grid scan keeps this
        // correct for any width/sigma combination.
        double min_mass = 1.0;
        const int nscan = 512;
        for (int i = 0; i <= nscan; ++i) {
            const double x = space.lo + (space.hi - space.lo) * i / nscan;
            const double m = norm_cdf((space.hi - x) / sigma) - norm_cdf((space.lo - x) / sigma);
            min_mass = std::min(min_mass, m);
        }
        if (min_mass <= 0.0) throw Error("mutation kernel has vanishing containment mass");
        k.envelope_c_ = 1.0 / min_mass;
    } else {
        k.envelope_c_ = 1.0;
    }
    return k;
}

MutationKernel MutationKernel::custom(std::function<double(Rng&, double)> sample,
                                      std::function<double(double, double)> density,
                                      std::function<double(double)> envelope_density,
                                      std::function<double(Rng&)> envelope_sample,
                                      double envelope_c) {
    MutationKernel k;
    k.sample_ = std::move(sample);
    k.density_ = std::move(density);
    k.env_density_ = std::move(envelope_density);
    k.env_sample_ = std::move(envelope_sample);
    k.envelope_c_ = envelope_c;
    return k;
}

double MutationKernel::containment_mass(double x) const {
    if (!gaussian_ || !space_.bounded) return 1.0;
    return norm_cdf((space_.hi - x) / sigma_) - norm_cdf((space_.lo - x) / sigma_);
}

double MutationKernel::sample(Rng& rng, double x) const {
    if (!gaussian_) return sample_(rng, x);
    if (!space_.bounded) return x + sigma_ * rng.normal();
    // Rejection against the box; acceptance is containment_mass(x) >= 1/C.
    for (;;) {
        const double z = x + sigma_ * rng.normal();
        if (z >= space_.lo && z <= space_.hi) return z;
    }
}

double MutationKernel::density(double x, double z) const {
    if (!gaussian_) return density_(x, z);
    if (space_.bounded && (z < space_.lo || z > space_.hi)) return 0.0;
    return norm_pdf((z - x) / sigma_) / sigma_ / containment_mass(x);
}

double MutationKernel::envelope_density(double h) const {
    if (!gaussian_) return env_density_(h);
    return norm_pdf(h / sigma_) / sigma_;
}

double MutationKernel::sample_envelope(Rng& rng) const {
    if (!gaussian_) return env_sample_(rng);
    return sigma_ * rng.normal();
}

MutationKernel MutationKernel::with_sigma_scaled(double factor) const {
    if (factor == 1.0) return *this;
    if (!gaussian_) throw Error("sigma rescaling requires a Gaussian mutation kernel");
    return gaussian(space_, sigma_ * factor);
}

}  // namespace ecoevo
