#pragma once
// Model definition layer.
//
// A ModelSpec carries the ecological ingredients of the individual-based
// process: per-capita birth rate b(x, zeta_V), per-capita death rate
// d(x, zeta_U), interaction kernels U and V, mutation probability mu(x) and
// mutation law M(x, dz).  zeta_U and zeta_V are the kernel-weighted
// neighborhood sums, self term included.
//
// A ScalingSpec selects one of the large-population regimes.  Resolving a
// (ModelSpec, ScalingSpec) pair yields an AppliedModel: the literal rates the
// engines evaluate, with the capacity division of the kernels, the K^eta
// demographic acceleration and the mutation rescalings already folded in.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ecoevo/common.hpp"
#include "ecoevo/kernels.hpp"
#include "ecoevo/mutation.hpp"

namespace ecoevo {

/// Declared bounds the validator probes and the rejection engine trusts.
/// `death_base + death_slope * zeta` must dominate d(x, zeta).
struct Envelopes {
    double birth_max = 0.0;     // sup b
    double death_base = 0.0;    // additive part of the death bound
    double death_slope = 0.0;   // zeta coefficient of the death bound
    double turnover_max = 1.0;  // sup of the acceleration profile r
};

/// Affine-in-competition special case: b = b0(x), d = d0(x) + alpha(x) zeta.
/// The engines use it to replace rate closures with cached coefficients.
struct LinearLogistic {
    std::function<double(double)> b0;
    std::function<double(double)> d0;
    std::function<double(double)> alpha;
};

struct ModelSpec {
    std::string name;
    TraitSpace space;
    std::function<double(double, double)> birth;   // b(x, zeta_V)
    std::function<double(double, double)> death;   // d(x, zeta_U)
    std::function<double(double)> mu;              // mutation probability at birth
    KernelPtr U;                                   // competition kernel
    KernelPtr V;                                   // birth interaction kernel
    MutationKernel mutation;
    Envelopes env;
    std::optional<LinearLogistic> ll;              // set when the affine form applies
    bool birth_uses_interaction = true;            // false lets engines skip zeta_V upkeep
    bool monotone = false;                         // b decreasing / d increasing in zeta
};

enum class ScalingMode {
    none,          // raw process, K fixed at 1
    capacity,      // kernels divided by K
    accel_gauss,   // capacity + K^eta turnover, mutation step sigma / K^(eta/2)
    accel_rare,    // capacity + K^eta turnover, mutation probability mu / K^eta
    tss_rare,      // capacity + mutation probability u_K * mu(x)
};

struct ScalingSpec {
    ScalingMode mode = ScalingMode::capacity;
    double K = 1.0;
    double eta = 0.0;                        // acceleration exponent in (0, 1]
    double u_K = 1.0;                        // rare-mutation factor for tss_rare
    std::function<double(double)> r;         // turnover profile; identity 1 when empty
};

const char* to_string(ScalingMode mode);
ScalingMode scaling_mode_from_string(const std::string& s);

/// Scaling-resolved model.  Everything the engines evaluate lives here.
class AppliedModel {
public:
    AppliedModel(const ModelSpec& model, const ScalingSpec& scaling);

    const ModelSpec& model() const { return *model_; }
    const ScalingSpec& scaling() const { return scaling_; }
    double K() const { return scaling_.K; }

    /// Multiplier applied to raw kernel values in neighborhood sums (1/K).
    double kernel_scale() const { return kernel_scale_; }

    /// K^eta when the regime accelerates turnover, else 0.
    double accel() const { return accel_; }

    double turnover(double x) const { return scaling_.r ? scaling_.r(x) : 1.0; }

    /// Applied per-capita rates; zeta arguments are already capacity-scaled.
    double birth(double x, double zeta_v) const {
        return accel_ * turnover(x) + model_->birth(x, zeta_v);
    }
    double death(double x, double zeta_u) const {
        return accel_ * turnover(x) + model_->death(x, zeta_u);
    }
    double mu(double x) const { return mu_scale_ * model_->mu(x); }

    const MutationKernel& mutation() const { return mutation_; }
    const InteractionKernel& U() const { return *model_->U; }
    const InteractionKernel& V() const { return *model_->V; }

    /// Total-event-rate envelope of the rejection sampler: with I individuals
    /// alive the candidate clock runs at cbar * I * (I + 1).
    double cbar() const { return cbar_; }

    /// True when rates reduce to cached affine coefficients.
    bool affine() const { return model_->ll.has_value(); }

    /// Affine coefficients with acceleration folded in.
    double coef_b(double x) const { return accel_ * turnover(x) + model_->ll->b0(x); }
    double coef_d0(double x) const { return accel_ * turnover(x) + model_->ll->d0(x); }
    double coef_alpha(double x) const { return model_->ll->alpha(x); }

    bool needs_v() const { return model_->birth_uses_interaction; }

private:
    const ModelSpec* model_;
    ScalingSpec scaling_;
    MutationKernel mutation_;
    double kernel_scale_ = 1.0;
    double accel_ = 0.0;
    double mu_scale_ = 1.0;
    double cbar_ = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> warnings;   // soft findings (timescale window, ...)
    int probes = 0;
    double worst_mass_deviation = 0.0;   // max |integral of M(x,.) - 1| seen
};

struct ValidationOptions {
    int probes = 2048;
    std::uint64_t probe_seed = 0x5eedf00d;  // fixed so validation is deterministic
    double zeta_max = 1e4;                  // neighborhood-sum probe range
    int mass_checks = 12;                   // quadrature points for kernel mass
    double mass_tol = 1e-6;                 // deviation that fails validation
    double quad_tol = 1e-8;                 // quadrature target accuracy
};

/// Randomized probing of every declared bound plus kernel-normalization
/// quadrature.  Throws ValidationError on failure; soft findings land in the
/// report's warning list.
ValidationReport validate_model(const ModelSpec& model, const ValidationOptions& opts = {});

/// Scaling-dependent checks (exponent ranges, turnover bound, the separation
/// window K * u_K * log K for the substitution-sequence regime).
ValidationReport validate_scaling(const ModelSpec& model, const ScalingSpec& scaling,
                                  const ValidationOptions& opts = {});

}  // namespace ecoevo
