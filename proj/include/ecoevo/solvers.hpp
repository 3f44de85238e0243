#pragma once
// Deterministic macroscopic solvers: the large-K limits of the particle
// process as ordinary, integro-differential and reaction-diffusion equations.

#include <functional>
#include <vector>

#include "ecoevo/model.hpp"

namespace ecoevo {

/// Uniform node grid over [lo, hi] with n cells (n + 1 nodes).
struct TraitGrid {
    double lo = 0.0, hi = 1.0;
    int cells = 128;

    TraitGrid() = default;
    TraitGrid(double lo_, double hi_, int cells_);

    int nodes() const { return cells + 1; }
    double dx() const { return (hi - lo) / cells; }
    double node(int i) const { return lo + i * dx(); }

    /// Trapezoid weight of node i.
    double weight(int i) const { return (i == 0 || i == cells) ? 0.5 * dx() : dx(); }
};

/// Unique positive root of b(x, V(0) n) = d(x, U(0) n).
/// Affine models use the closed form (b0 - d0) / (alpha U(0)); general models
/// bisect to |b - d| < 1e-10.  Throws NoPositiveEquilibrium when no positive
/// root exists (and none is approached from a viable start).
double equilibrium_nbar(const ModelSpec& model, double x);

struct OdeSeries {
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // one state vector per time
    int steps_used = 0;
};

struct OdeOptions {
    double rel_tol = 1e-8;
    int record_points = 64;
};

/// Single-trait density n(t) under dn/dt = n (b(x, V(0) n) - d(x, U(0) n)).
OdeSeries solve_monomorphic(const ModelSpec& model, double x, double n0, double t_end,
                            const OdeOptions& opts = {});

/// Two-trait densities with cross interactions through U and V at the trait
/// displacement.
OdeSeries solve_dimorphic(const ModelSpec& model, double x1, double x2,
                          double n1_0, double n2_0, double t_end,
                          const OdeOptions& opts = {});

enum class IdeMode {
    standard,       // growth uses (1 - mu) b and the mutant inflow integral
    rare_mutation,  // growth uses plain b - d, inflow mu(y) r(y) xi(y) M(y, x)
};

struct FieldOptions {
    int record_points = 32;
    double rel_tol = 1e-6;        // step-doubling target on the final profile
    double dt0 = 0.1;             // initial trial step
    double clip_fraction = 1e-3;  // negative-mass clip fraction that aborts
    double forced_dt = 0.0;       // nonzero bypasses step adaptation
    std::function<double(double)> turnover;  // r(x) for rare_mutation inflow
};

struct FieldSolution {
    TraitGrid grid;
    std::vector<double> times;
    std::vector<std::vector<double>> xi;  // density per node at each time
    double dt_used = 0.0;
    double clipped_mass = 0.0;

    double mass_at(std::size_t ti) const;
};

/// Nonlocal density dynamics on the grid, method of lines with trapezoid
/// convolutions and RK4 in time.  Step size is halved until the final
/// profiles agree within rel_tol (L1, relative to total mass).
FieldSolution solve_ide(const ModelSpec& model, const TraitGrid& grid,
                        const std::vector<double>& xi0, double t_end,
                        IdeMode mode, const FieldOptions& opts = {});

/// Reaction-diffusion dynamics: growth (b - d) xi plus a diffusion term
/// half * Laplacian of (c xi), with zero-flux boundaries.  The diffusion
/// stencil is in flux form, so total trapezoid mass is conserved exactly when
/// the reaction vanishes.  Throws CFLViolation when a forced step exceeds
/// 0.4 dx^2 / max(c).
FieldSolution solve_rd_pde(const ModelSpec& model, const TraitGrid& grid,
                           const std::vector<double>& xi0, double t_end,
                           const std::function<double(double)>& c,
                           const FieldOptions& opts = {});

}  // namespace ecoevo
