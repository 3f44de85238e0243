#include "ecoevo/population.hpp"

#include <algorithm>
#include <cmath>

namespace ecoevo {

Population::Population(const AppliedModel& applied, const std::vector<Atom>& init)
    : applied_(&applied),
      tracks_v_(applied.needs_v()),
      u_aux_n_(applied.U().aux_count()),
      v_aux_n_(applied.V().aux_count()) {
    const TraitSpace& space = applied.model().space;
    for (const Atom& a : init) {
        if (a.n <= 0) throw ConfigError("initial atom with nonpositive multiplicity");
        if (!space.contains(a.x)) throw ConfigError("initial trait outside the trait space");
        const std::size_t g = ensure_group(a.x);
        n_[g] += a.n;
        count_ += a.n;
    }
    rebuild_sums();
}

std::size_t Population::ensure_group(double z) {
    for (std::size_t g = 0; g < x_.size(); ++g)
        if (x_[g] == z) return g;
    x_.push_back(z);
    n_.push_back(0);
    su_.push_back(0.0);
    if (tracks_v_) sv_.push_back(0.0);
    uaux0_.push_back(0.0);
    uaux1_.push_back(0.0);
    if (tracks_v_) {
        vaux0_.push_back(0.0);
        vaux1_.push_back(0.0);
    }
    const std::size_t g = x_.size() - 1;
    double ua[2] = {0.0, 0.0}, va[2] = {0.0, 0.0};
    prepare_aux(z, ua, va);
    uaux0_[g] = ua[0];
    uaux1_[g] = ua[1];
    if (tracks_v_) {
        vaux0_[g] = va[0];
        vaux1_[g] = va[1];
    }
    return g;
}

void Population::prepare_aux(double z, double* uaux, double* vaux) const {
    if (u_aux_n_ > 0) applied_->U().prepare_aux(z, uaux);
    if (tracks_v_ && v_aux_n_ > 0) applied_->V().prepare_aux(z, vaux);
}

void Population::eval_u_batch(double z, const double* zaux, Buffers& buf) const {
    const std::size_t g = x_.size();
    buf.to_z.resize(g);
    buf.from_z.resize(g);
    applied_->U().eval_many(x_.data(), uaux0_.data(), uaux1_.data(), g, z, zaux,
                            buf.to_z.data(), buf.from_z.data());
}

void Population::eval_v_batch(double z, const double* zaux, Buffers& buf) const {
    const std::size_t g = x_.size();
    buf.to_z.resize(g);
    buf.from_z.resize(g);
    applied_->V().eval_many(x_.data(), vaux0_.data(), vaux1_.data(), g, z, zaux,
                            buf.to_z.data(), buf.from_z.data());
}

Population::AddResult Population::add_individual(double z) {
    const double scale = applied_->kernel_scale();
    double zu[2] = {0.0, 0.0}, zv[2] = {0.0, 0.0};
    prepare_aux(z, zu, zv);

    const std::size_t before = x_.size();
    // Influence of the newcomer on every existing trait, and of every
    // existing individual on the newcomer, in one batch.
    eval_u_batch(z, zu, scratch_);
    double onto_z = 0.0;
    for (std::size_t g = 0; g < before; ++g) {
        su_[g] += scale * scratch_.to_z[g];
        onto_z += static_cast<double>(n_[g]) * scratch_.from_z[g];
    }
    double onto_z_v = 0.0;
    if (tracks_v_) {
        eval_v_batch(z, zv, scratch_);
        for (std::size_t g = 0; g < before; ++g) {
            sv_[g] += scale * scratch_.to_z[g];
            onto_z_v += static_cast<double>(n_[g]) * scratch_.from_z[g];
        }
    }

    std::size_t g = ensure_group(z);
    const bool created = x_.size() > before;
    if (created) {
        // Sums of the new trait: whole pre-insertion population plus itself.
        su_[g] = scale * (onto_z + applied_->U()(0.0));
        if (tracks_v_) sv_[g] = scale * (onto_z_v + applied_->V()(0.0));
    }
    n_[g] += 1;
    count_ += 1;
    return {g, created};
}

Population::RemoveResult Population::remove_individual(std::size_t g) {
    if (g >= x_.size()) throw IndexOutOfRange("remove_individual: no such group");
    const double scale = applied_->kernel_scale();
    const double z = x_[g];
    double zu[2] = {uaux0_[g], uaux1_[g]};
    eval_u_batch(z, zu, scratch_);
    for (std::size_t h = 0; h < x_.size(); ++h) su_[h] -= scale * scratch_.to_z[h];
    if (tracks_v_) {
        double zv[2] = {vaux0_[g], vaux1_[g]};
        eval_v_batch(z, zv, scratch_);
        for (std::size_t h = 0; h < x_.size(); ++h) sv_[h] -= scale * scratch_.to_z[h];
    }
    n_[g] -= 1;
    count_ -= 1;
    if (n_[g] > 0) return {false, g};
    const std::size_t last = x_.size() - 1;
    RemoveResult res{true, last};
    if (g != last) {
        x_[g] = x_[last];
        n_[g] = n_[last];
        su_[g] = su_[last];
        uaux0_[g] = uaux0_[last];
        uaux1_[g] = uaux1_[last];
        if (tracks_v_) {
            sv_[g] = sv_[last];
            vaux0_[g] = vaux0_[last];
            vaux1_[g] = vaux1_[last];
        }
    }
    x_.pop_back();
    n_.pop_back();
    su_.pop_back();
    uaux0_.pop_back();
    uaux1_.pop_back();
    if (tracks_v_) {
        sv_.pop_back();
        vaux0_.pop_back();
        vaux1_.pop_back();
    }
    return res;
}

void Population::rebuild_sums() {
    const double scale = applied_->kernel_scale();
    const std::size_t G = x_.size();
    std::fill(su_.begin(), su_.end(), 0.0);
    if (tracks_v_) std::fill(sv_.begin(), sv_.end(), 0.0);
    // Accumulate source-by-source with the batched kernel.
    for (std::size_t h = 0; h < G; ++h) {
        const double w = static_cast<double>(n_[h]);
        double zu[2] = {uaux0_[h], uaux1_[h]};
        eval_u_batch(x_[h], zu, scratch_);
        for (std::size_t g = 0; g < G; ++g) su_[g] += w * scale * scratch_.to_z[g];
        if (tracks_v_) {
            double zv[2] = {vaux0_[h], vaux1_[h]};
            eval_v_batch(x_[h], zv, scratch_);
            for (std::size_t g = 0; g < G; ++g) sv_[g] += w * scale * scratch_.to_z[g];
        }
    }
}

double Population::audit_sums() const {
    const double scale = applied_->kernel_scale();
    const std::size_t G = x_.size();
    double worst = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
        double su = 0.0, sv = 0.0;
        for (std::size_t h = 0; h < G; ++h) {
            const double w = static_cast<double>(n_[h]);
            su += w * applied_->U()(x_[g] - x_[h]);
            if (tracks_v_) sv += w * applied_->V()(x_[g] - x_[h]);
        }
        su *= scale;
        sv *= scale;
        const double du = std::abs(su - su_[g]) / std::max(1.0, std::abs(su));
        worst = std::max(worst, du);
        if (tracks_v_) {
            const double dv = std::abs(sv - sv_[g]) / std::max(1.0, std::abs(sv));
            worst = std::max(worst, dv);
        }
    }
    return worst;
}

std::vector<Atom> Population::atoms() const {
    std::vector<Atom> out;
    out.reserve(x_.size());
    for (std::size_t g = 0; g < x_.size(); ++g) out.push_back({x_[g], n_[g]});
    std::sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    return out;
}

RateTable eval_rates(const Population& pop, long long group) {
    const AppliedModel& am = pop.applied();
    const std::size_t G = pop.group_count();
    if (group >= 0 && static_cast<std::size_t>(group) >= G)
        throw IndexOutOfRange("eval_rates: group index beyond live population");
    RateTable t;
    const std::size_t lo = group < 0 ? 0 : static_cast<std::size_t>(group);
    const std::size_t hi = group < 0 ? G : lo + 1;
    for (std::size_t g = lo; g < hi; ++g) {
        const double x = pop.trait(g);
        const double su = pop.sum_u(g);
        const double sv = pop.sum_v(g);
        const double b = am.birth(x, sv);
        const double d = am.death(x, su);
        const double m = static_cast<double>(pop.multiplicity(g));
        t.birth.push_back(b);
        t.death.push_back(d);
        t.mu.push_back(am.mu(x));
        t.sum_u.push_back(su);
        t.sum_v.push_back(sv);
        t.total_birth += m * b;
        t.total_death += m * d;
    }
    return t;
}

}  // namespace ecoevo
