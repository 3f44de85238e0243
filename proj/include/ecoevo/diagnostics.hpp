#pragma once
// Statistical diagnostics over trajectory ensembles: martingale residuals,
// first-moment identities, transport distance and the fluctuation-scaling
// study.

#include <string>
#include <vector>

#include "ecoevo/solvers.hpp"
#include "ecoevo/trajectory.hpp"

namespace ecoevo {

struct MartingaleReport {
    std::string probe;        // "1" for the exact total-mass track
    double t_eval = 0.0;
    int replicates = 0;
    double mean_residual = 0.0;
    double se_residual = 0.0;
    double zscore = 0.0;           // |mean| / se
    double var_residual = 0.0;
    double predicted_bracket = 0.0;  // ensemble mean of the bracket integral
    double ratio = 0.0;              // var_residual / predicted_bracket
    double ratio_low = 0.0, ratio_high = 0.0;  // +-2 se band on the ratio
    double quadrature_error = 0.0;   // sampled-integrand probes only
    bool zero_mean_pass = false;     // zscore <= 3
};

/// Residual M_t = <nu_t,f> - <nu_0,f> - compensator(t) evaluated per
/// replicate at the last common track time <= t_eval.
///
/// The constant test function uses the exact event-driven accumulators.  A
/// named probe integrates its sampled integrand with the trapezoid rule; if
/// the Richardson error estimate of that quadrature exceeds 10% of the
/// predicted bracket the cadence is too coarse and InsufficientCadence is
/// thrown.
MartingaleReport martingale_residual(const std::vector<Trajectory>& ensemble,
                                     const std::string& probe, double t_eval);

struct MomentReport {
    std::vector<double> times;      // interior snapshot times used
    std::vector<double> lhs;        // centered difference of mean mass
    std::vector<double> rhs;        // ensemble mean of recorded drift integrand
    double max_abs_error = 0.0;
    double scale = 0.0;             // max |rhs| over the window
    double relative_error = 0.0;
};

/// First-moment identity on the total mass: d/dt E<nu,1> versus the expected
/// integrated growth E[B - D], the latter split into base and pair-competition
/// parts when the model is affine.
MomentReport moment_identity_check(const std::vector<Trajectory>& ensemble);

/// Weighted one-dimensional empirical measure.
struct WeightedSample {
    std::vector<double> x;
    std::vector<double> w;
};

/// Wasserstein-1 distance between two equal-mass measures by the sorted CDF
/// sweep.  Throws MassMismatch if total masses differ by more than 1e-9
/// relative (unless normalize is set, which rescales both to mass one).
double wasserstein1(WeightedSample a, WeightedSample b, bool normalize = false);

double wasserstein1_points(const std::vector<double>& a, const std::vector<double>& b);

struct ScalingRow {
    double K = 0.0;
    int replicates = 0;
    double var_mass = 0.0;     // variance of renormalized mass at t_probe
    double mean_mass = 0.0;
    double w1_vs_limit = 0.0;  // distance of the mean measure to the field solution
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double slope = 0.0;        // log Var against log K
    double t_probe = 0.0;
};

struct ScalingStudyOptions {
    int replicates = 200;
    double t_probe = 10.0;
    int bins = 160;
    int workers = 1;
    double mass_dt = 0.5;
    std::uint64_t seed = 1;
};

/// Variance of the renormalized total mass and distance of the mean empirical
/// measure to the deterministic field, across capacities.
ScalingReport scaling_study(const ModelSpec& model, const std::vector<double>& Ks,
                            double x0, IdeMode mode, const ScalingStudyOptions& opts);

}  // namespace ecoevo
