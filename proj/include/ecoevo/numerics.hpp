#pragma once
// Quadrature and ODE stepping utilities shared by the model validator, the
// density solvers and the diagnostics.

#include <functional>
#include <vector>

#include "ecoevo/common.hpp"

namespace ecoevo {

/// Standard normal CDF.
double norm_cdf(double x);

/// Standard normal density.
double norm_pdf(double x);

/// Adaptive Simpson quadrature of f over [a,b].
/// Throws QuadratureFailure if the tolerance cannot be met within the
/// recursion depth limit.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 40);

/// Nodes/weights of 32-point Gauss-Legendre quadrature mapped to [a,b],
/// appended to xs/ws.  Exact for polynomials up to degree 63; used for smooth
/// kernel integrals where adaptivity is unnecessary.
void gauss_legendre_32(double a, double b, std::vector<double>& xs, std::vector<double>& ws);

/// Classical fixed-step RK4 advance of y' = f(t, y) from t0 to t1 in `steps`
/// equal steps, in place.
void rk4_fixed(const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f,
               std::vector<double>& y, double t0, double t1, int steps);

/// RK4 with step-doubling: halves the step count until two successive
/// solutions agree at t1 within `rel_tol` relative (sup norm against scale of
/// the solution).  Returns the accepted solution and the step count used.
struct Rk4Result {
    std::vector<double> y;
    int steps;
};
Rk4Result rk4_adaptive(const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f,
                       const std::vector<double>& y0, double t0, double t1,
                       double rel_tol = 1e-8, int initial_steps = 16, int max_doublings = 22);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ecoevo
