#pragma once
// Live population state.
//
// The point measure is stored grouped by distinct trait value: individuals
// sharing a trait are interchangeable, have identical rates and identical
// neighborhood sums, so one entry per trait with a multiplicity suffices.
// Per-event work is then linear in the number of distinct traits instead of
// the number of individuals.
//
// Invariants maintained after every mutation of the state:
//   - multiplicities are positive integers; count == sum of multiplicities
//   - su[g] (and sv[g] when tracked) equal the capacity-scaled kernel sums
//     over the whole population, self term included
//   - aux arrays hold the kernel auxiliaries of each live trait

#include <cstdint>
#include <vector>

#include "ecoevo/model.hpp"

namespace ecoevo {

struct Atom {
    double x;
    long long n;
};

class Population {
public:
    Population(const AppliedModel& applied, const std::vector<Atom>& init);

    const AppliedModel& applied() const { return *applied_; }

    std::size_t group_count() const { return x_.size(); }
    long long count() const { return count_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    double trait(std::size_t g) const { return x_[g]; }
    long long multiplicity(std::size_t g) const { return n_[g]; }
    double sum_u(std::size_t g) const { return su_[g]; }
    double sum_v(std::size_t g) const { return tracks_v_ ? sv_[g] : 0.0; }

    const double* traits() const { return x_.data(); }
    const long long* multiplicities() const { return n_.data(); }

    struct AddResult {
        std::size_t group;
        bool created;  // a new trait group was appended at `group`
    };
    /// Adds one individual with trait z.  Updates every cached sum and
    /// returns the group index holding the newcomer.
    AddResult add_individual(double z);

    struct RemoveResult {
        bool erased;             // the group died and was compacted away
        std::size_t moved_from;  // when erased: old index of the group now at g
    };
    /// Removes one individual from group g; compacts the group away when its
    /// multiplicity reaches zero (swap with the last group).
    RemoveResult remove_individual(std::size_t g);

    /// Recomputes all cached sums from scratch (quadratic in group count).
    void rebuild_sums();

    /// Largest relative error between cached and recomputed sums.
    double audit_sums() const;

    std::vector<Atom> atoms() const;

    // Engine-facing raw access ------------------------------------------------

    struct Buffers {
        std::vector<double> to_z;    // kernel(x_g - z)
        std::vector<double> from_z;  // kernel(z - x_g)
    };

    /// U-kernel batch against every live trait; fills buffers sized to the
    /// group count.
    void eval_u_batch(double z, const double* zaux, Buffers& buf) const;
    void eval_v_batch(double z, const double* zaux, Buffers& buf) const;

    /// Writes the U (and V) auxiliaries of trait z into the caller's arrays.
    void prepare_aux(double z, double* uaux, double* vaux) const;

    double* su_data() { return su_.data(); }
    bool tracks_v() const { return tracks_v_; }

private:
    std::size_t ensure_group(double z);
    void erase_group(std::size_t g);

    const AppliedModel* applied_;
    bool tracks_v_;
    int u_aux_n_, v_aux_n_;

    std::vector<double> x_;
    std::vector<long long> n_;
    std::vector<double> su_, sv_;
    std::vector<double> uaux0_, uaux1_, vaux0_, vaux1_;
    long long count_ = 0;
    double time_ = 0.0;

    mutable Buffers scratch_;
};

/// Per-group rate table, the public view of the cached-rate layer.
struct RateTable {
    std::vector<double> birth;   // per-capita applied birth rate of each group
    std::vector<double> death;   // per-capita applied death rate
    std::vector<double> mu;      // applied mutation probability
    std::vector<double> sum_u;   // capacity-scaled competition sums
    std::vector<double> sum_v;
    double total_birth = 0.0;    // group-rate totals (per-capita * multiplicity)
    double total_death = 0.0;
};

/// Evaluates every per-group rate from the cached sums.  Throws
/// IndexOutOfRange when asked for a single group outside the population
/// (group >= 0 selects one group; -1 evaluates all).
RateTable eval_rates(const Population& pop, long long group = -1);

}  // namespace ecoevo
