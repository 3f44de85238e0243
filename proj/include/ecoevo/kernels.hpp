#pragma once
// Interaction kernels U (competition, enters the death rate) and V (enters
// the birth rate).  A kernel is a bounded nonnegative function of the trait
// displacement h = x - y.
//
// The simulation engine updates every cached neighborhood sum after each
// birth or death, so kernel evaluation against a whole trait batch is the
// hottest loop in the program.  Kernels may publish per-trait auxiliary
// values (computed once when a trait enters the population) that turn the
// batched evaluation into a handful of arithmetic operations per trait.

#include <cstddef>
#include <functional>
#include <memory>
#include <string>

namespace ecoevo {

class InteractionKernel {
public:
    virtual ~InteractionKernel() = default;

    /// Kernel value at displacement h.
    virtual double operator()(double h) const = 0;

    /// An upper bound for the kernel over all displacements.
    virtual double bound() const = 0;

    /// Number of cached auxiliary doubles per trait (at most 2).
    virtual int aux_count() const { return 0; }

    /// Fill `aux` (aux_count() slots) for trait x.
    virtual void prepare_aux(double /*x*/, double* /*aux*/) const {}

    /// Batched evaluation against traits xs[0..n): writes
    ///   to_z[g]   = kernel(xs[g] - z)   (influence of z on g)
    ///   from_z[g] = kernel(z - xs[g])   (influence of g on z)
    /// aux0/aux1 hold the per-trait auxiliary values, zaux those of z.
    /// The default loops over operator(); subclasses override for speed.
    virtual void eval_many(const double* xs, const double* aux0, const double* aux1,
                           std::size_t n, double z, const double* zaux,
                           double* to_z, double* from_z) const;

    virtual std::string describe() const = 0;
};

using KernelPtr = std::shared_ptr<const InteractionKernel>;

/// Constant kernel (mean-field competition when the constant is 1, absent
/// interaction when it is 0).
KernelPtr constant_kernel(double value);

/// a * (1 - 1 / (1 + c * exp(-lambda h))): smoothed step favoring individuals
/// with larger traits in asymmetric competition.  Cached auxiliaries are
/// exp(-lambda x) and exp(lambda x), so the batch needs one division per
/// trait and two exponentials total.
KernelPtr sigmoid_kernel(double a, double c, double lambda);

/// exp(-h^2 / (2 s^2)) scaled by `amp`.
KernelPtr gaussian_kernel(double amp, double s);

/// Arbitrary function kernel for tests; `bound` must dominate it.
KernelPtr function_kernel(std::function<double(double)> f, double bound, std::string label);

}  // namespace ecoevo
