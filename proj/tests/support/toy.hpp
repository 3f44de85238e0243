#pragma once

// Small exactly-solvable models shared by the engine tests and the acceptance
// harness, plus the dense-chain builders that map them onto the ctmc oracle.

#include <cmath>
#include <cstddef>
#include <vector>

#include "ecoevo/model.hpp"
#include "ecoevo/mutation.hpp"
#include "support/ctmc.hpp"

namespace toy {

// Two-trait birth-death model with hard truncation at `cap` individuals per
// trait.  The per-trait head count is exposed to the birth rate through an
// indicator interaction kernel V whose support (|h| < 0.2) separates the two
// traits (0.3 and 0.7), so zeta_V equals the count at the individual's own
// trait.  Death is affine in the total population through a constant U.
// Run at K = 1 with scaling mode `none`, the process is exactly the finite
// chain on {0..cap} x {0..cap} built by `pair_chain` below.
struct PairParams {
  double b0 = 0.02;
  double d0 = 0.004;
  double alpha = 0.00125;
  int cap = 30;
  double x1 = 0.3;
  double x2 = 0.7;
};

inline ecoevo::ModelSpec pair_model(const PairParams& p = {}) {
  ecoevo::ModelSpec m;
  m.name = "truncated-pair";
  m.space = ecoevo::TraitSpace{1, 0.0, 1.0, true};
  const double b0 = p.b0, d0 = p.d0, alpha = p.alpha;
  const double cut = p.cap - 0.5;
  m.birth = [b0, cut](double, double zv) { return zv < cut ? b0 : 0.0; };
  m.death = [d0, alpha](double, double zu) { return d0 + alpha * zu; };
  m.mu = [](double) { return 0.0; };
  m.U = ecoevo::constant_kernel(1.0);
  m.V = ecoevo::function_kernel([](double h) { return std::fabs(h) < 0.2 ? 1.0 : 0.0; },
                                1.0, "indicator(|h|<0.2)");
  m.mutation = ecoevo::MutationKernel::gaussian(m.space, 0.05);
  m.env.birth_max = b0;
  m.env.death_base = d0;
  m.env.death_slope = alpha;
  m.env.turnover_max = 1.0;
  m.birth_uses_interaction = true;
  m.monotone = true;
  return m;
}

// Dense generator of the pair model on (n1, n2) in {0..cap}^2, state index
// n1 * (cap+1) + n2.  Birth at trait i: n_i * b0 while n_i < cap; death at
// trait i: n_i * (d0 + alpha * (n1 + n2)).
inline ctmc::Chain pair_chain(const PairParams& p = {}) {
  const int w = p.cap + 1;
  ctmc::Chain c;
  c.n = w * w;
  c.q.assign(static_cast<std::size_t>(c.n) * c.n, 0.0);
  auto at = [&](int s, int t) -> double& { return c.q[static_cast<std::size_t>(s) * c.n + t]; };
  for (int n1 = 0; n1 <= p.cap; ++n1) {
    for (int n2 = 0; n2 <= p.cap; ++n2) {
      const int s = n1 * w + n2;
      const double dpc = p.d0 + p.alpha * (n1 + n2);
      if (n1 < p.cap && n1 > 0) at(s, (n1 + 1) * w + n2) += n1 * p.b0;
      if (n2 < p.cap && n2 > 0) at(s, n1 * w + (n2 + 1)) += n2 * p.b0;
      if (n1 > 0) at(s, (n1 - 1) * w + n2) += n1 * dpc;
      if (n2 > 0) at(s, n1 * w + (n2 - 1)) += n2 * dpc;
    }
  }
  ctmc::close_rows(c);
  return c;
}

// Pure-death single-trait model: no births, constant per-capita death rate.
// Survival of each initial individual is independent Bernoulli(exp(-d0*t)),
// so the population size at t is Binomial(n0, exp(-d0*t)) in closed form.
inline ecoevo::ModelSpec pure_death_model(double d0) {
  ecoevo::ModelSpec m;
  m.name = "pure-death";
  m.space = ecoevo::TraitSpace{1, 0.0, 1.0, true};
  m.birth = [](double, double) { return 0.0; };
  m.death = [d0](double, double) { return d0; };
  m.mu = [](double) { return 0.0; };
  m.U = ecoevo::constant_kernel(0.0);
  m.V = ecoevo::constant_kernel(0.0);
  m.mutation = ecoevo::MutationKernel::gaussian(m.space, 0.05);
  m.env.birth_max = 0.0;
  m.env.death_base = d0;
  m.env.death_slope = 0.0;
  m.env.turnover_max = 1.0;
  m.birth_uses_interaction = false;
  // Not flagged monotone: the viability probe b(x, 0) > d(x, 0) is exactly
  // what this deliberately dying model violates.
  m.monotone = false;
  m.ll = ecoevo::LinearLogistic{[](double) { return 0.0; },
                                [d0](double) { return d0; },
                                [](double) { return 0.0; }};
  return m;
}

inline ctmc::Chain pure_death_chain(double d0, int nmax) {
  ctmc::Chain c;
  c.n = nmax + 1;
  c.q.assign(static_cast<std::size_t>(c.n) * c.n, 0.0);
  for (int n = 1; n <= nmax; ++n)
    c.q[static_cast<std::size_t>(n) * c.n + (n - 1)] = n * d0;
  ctmc::close_rows(c);
  return c;
}

// Total-variation distance between an empirical histogram (counts) and a
// reference distribution over the same state indexing.
inline double tv_distance(const std::vector<long long>& counts, const std::vector<double>& ref) {
  long long total = 0;
  for (long long c : counts) total += c;
  double tv = 0.0;
  for (std::size_t s = 0; s < ref.size(); ++s) {
    const double emp = total > 0 ? static_cast<double>(counts[s]) / total : 0.0;
    tv += std::fabs(emp - ref[s]);
  }
  return 0.5 * tv;
}

}  // namespace toy
