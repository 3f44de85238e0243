#pragma once
// Small statistical helpers used by tests and diagnostics.

#include <cstddef>
#include <vector>

namespace ecoevo {

double mean(const std::vector<double>& v);

/// Unbiased sample variance (n-1 denominator); 0 for fewer than two points.
double variance(const std::vector<double>& v);

/// Linear-interpolated quantile of a copy-sorted sample, q in [0,1].
double quantile(std::vector<double> v, double q);

/// Survival function of the Kolmogorov distribution, Q(lambda).
double kolmogorov_q(double lambda);

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
double ks_two_sample_p(std::vector<double> a, std::vector<double> b);

/// Standard deviation of a binomial proportion estimate.
double binomial_sigma(double p, std::size_t n);

}  // namespace ecoevo
