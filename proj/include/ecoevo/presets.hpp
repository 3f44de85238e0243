#pragma once
// Model factories and named run presets.

#include <string>
#include <vector>

#include "ecoevo/config.hpp"
#include "ecoevo/engine.hpp"
#include "ecoevo/model.hpp"

namespace ecoevo {

/// Asymmetric-competition model on the trait interval [0, 4]:
///   b(x) = 4 - x, d = zeta (pure competition death),
///   U(h) = 2 (1 - 1 / (1 + 1.2 exp(-4 h))), no birth interaction,
///   Gaussian mutation of width sigma conditioned to the interval,
///   constant mutation probability mu.
ModelSpec kisdi_model(double sigma, double mu);

/// Mean-field affine model: birth max(0, b0 - b1 x), death d0 + alpha * zeta
/// with U identically u0, optional Gaussian mutation.
ModelSpec linear_logistic_model(double b0, double b1, double d0, double alpha,
                                double u0, double mu, double sigma, TraitSpace space);

/// Pure birth at rate b (no death, no interaction, no mutation).
ModelSpec yule_model(double b);

/// Text of a named preset configuration; throws ConfigError for unknown names.
/// Available: fig1a fig1b fig1c fig1d fig2a fig2b fig2c fig2d kisdi-base.
std::string preset_text(const std::string& name);

std::vector<std::string> preset_names();

/// Everything needed to execute a configured run.
struct RunSetup {
    ModelSpec model;
    ScalingSpec scaling;
    SimOptions sim;
    RecorderConfig rec;
    std::vector<Atom> init;
    int replicates = 1;
    int workers = 1;
    bool renormalize = true;
    std::string model_name;
};

/// Consumes the [model] section only (limit solvers need no scaling or run).
ModelSpec build_model(ExperimentConfig& cfg);

/// Consumes [model], [scaling], [run] and [output] sections.
RunSetup build_run(ExperimentConfig& cfg);

}  // namespace ecoevo
