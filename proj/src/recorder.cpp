#include "ecoevo/recorder.hpp"

#include <algorithm>
#include <cmath>

#include "ecoevo/numerics.hpp"

namespace ecoevo {

namespace {

/// Integral of f against the mutation law at parent trait x.
double mutation_integral(const MutationKernel& m, const TraitSpace& space, double x,
                         const std::function<double(double)>& f) {
    double lo, hi;
    if (m.is_gaussian()) {
        lo = x - 10.0 * m.sigma();
        hi = x + 10.0 * m.sigma();
        if (space.bounded) {
            lo = std::max(lo, space.lo);
            hi = std::min(hi, space.hi);
        }
    } else if (space.bounded) {
        lo = space.lo;
        hi = space.hi;
    } else {
        lo = x - 100.0;
        hi = x + 100.0;
    }
    std::vector<double> xs, ws;
    xs.reserve(64);
    ws.reserve(64);
    // Two panels put nodes tight around the parent where the density peaks.
    if (lo < x && x < hi) {
        gauss_legendre_32(lo, x, xs, ws);
        gauss_legendre_32(x, hi, xs, ws);
    } else {
        gauss_legendre_32(lo, hi, xs, ws);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += ws[i] * f(xs[i]) * m.density(x, xs[i]);
    return acc;
}

}  // namespace

Recorder::Recorder(const AppliedModel& applied, const RecorderConfig& cfg, double t_end)
    : applied_(&applied), cfg_(cfg), t_end_(t_end) {
    double lo = applied.model().space.lo, hi = applied.model().space.hi;
    if (cfg_.hist_range) {
        lo = cfg_.hist_range->first;
        hi = cfg_.hist_range->second;
    } else if (!applied.model().space.bounded) {
        throw ConfigError("histogram range required for an unbounded trait space");
    }
    if (cfg_.bins < 1) throw ConfigError("histogram needs at least one bin");
    if (!(cfg_.snapshot_dt > 0.0) || !(cfg_.mass_dt > 0.0))
        throw ConfigError("recorder cadences must be positive");
    out_.bin_edges.resize(cfg_.bins + 1);
    for (int i = 0; i <= cfg_.bins; ++i)
        out_.bin_edges[i] = lo + (hi - lo) * i / cfg_.bins;
    out_.K = applied.K();
    for (const Probe& p : cfg_.probes) out_.probes.push_back({p.name, {}, {}, {}});
}

void Recorder::begin(const Population& pop, double, double, double base_minus, double pair) {
    now_ = pop.time();
    cur_base_ = base_minus;
    cur_pair_ = pair;
    emit_snapshot(now_, pop);
    emit_mass_point(now_, pop);
    next_snap_ = now_ + cfg_.snapshot_dt;
    next_mass_ = now_ + cfg_.mass_dt;
}

void Recorder::emit_snapshot(double t, const Population& pop) {
    const double lo = out_.bin_edges.front(), hi = out_.bin_edges.back();
    std::vector<double> h(static_cast<std::size_t>(cfg_.bins), 0.0);
    for (std::size_t g = 0; g < pop.group_count(); ++g) {
        const double x = pop.trait(g);
        int b = static_cast<int>((x - lo) / (hi - lo) * cfg_.bins);
        b = std::clamp(b, 0, cfg_.bins - 1);
        h[static_cast<std::size_t>(b)] += static_cast<double>(pop.multiplicity(g));
    }
    out_.snap_times.push_back(t);
    out_.histogram.push_back(std::move(h));

    if (!cfg_.probes.empty()) {
        const RateTable rates = eval_rates(pop);
        const AppliedModel& am = *applied_;
        for (std::size_t pi = 0; pi < cfg_.probes.size(); ++pi) {
            const auto& f = cfg_.probes[pi].f;
            double value = 0.0, drift = 0.0, bracket = 0.0;
            for (std::size_t g = 0; g < pop.group_count(); ++g) {
                const double x = pop.trait(g);
                const double n = static_cast<double>(pop.multiplicity(g));
                const double fx = f(x);
                const double b = rates.birth[g], d = rates.death[g], mu = rates.mu[g];
                double integral_f = 0.0, integral_f2 = 0.0;
                if (mu > 0.0) {
                    integral_f = mutation_integral(am.mutation(), am.model().space, x, f);
                    integral_f2 = mutation_integral(am.mutation(), am.model().space, x,
                                                    [&](double z) { const double v = f(z); return v * v; });
                }
                value += n * fx;
                drift += n * (((1.0 - mu) * b - d) * fx + mu * b * integral_f);
                bracket += n * (((1.0 - mu) * b + d) * fx * fx + mu * b * integral_f2);
            }
            out_.probes[pi].value.push_back(value);
            out_.probes[pi].drift.push_back(drift);
            out_.probes[pi].bracket.push_back(bracket);
        }
    }
}

void Recorder::emit_mass_point(double t, const Population& pop) {
    out_.mass_times.push_back(t);
    out_.mass.push_back(static_cast<double>(pop.count()));
    out_.drift1.push_back(drift_acc_);
    out_.bracket1.push_back(bracket_acc_);
    if (cfg_.affine_terms) {
        out_.base_term.push_back(cur_base_);
        out_.pair_term.push_back(cur_pair_);
    }
}

void Recorder::advance(double t, const Population& pop, double total_birth, double total_death,
                       double base_minus, double pair) {
    t = std::min(t, t_end_);
    cur_base_ = base_minus;
    cur_pair_ = pair;
    const double drift_rate = total_birth - total_death;
    const double bracket_rate = total_birth + total_death;
    // The integrands are constant on [now_, t); split the segment at every
    // cadence boundary so the accumulators are exact at emission times.
    for (;;) {
        double boundary = std::min(next_snap_, next_mass_);
        if (boundary > t || boundary > t_end_ + 1e-12) break;
        const double dt = boundary - now_;
        drift_acc_ += drift_rate * dt;
        bracket_acc_ += bracket_rate * dt;
        now_ = boundary;
        if (boundary == next_mass_) {
            emit_mass_point(boundary, pop);
            next_mass_ += cfg_.mass_dt;
        }
        if (boundary == next_snap_) {
            emit_snapshot(boundary, pop);
            next_snap_ += cfg_.snapshot_dt;
        }
    }
    const double dt = t - now_;
    if (dt > 0.0) {
        drift_acc_ += drift_rate * dt;
        bracket_acc_ += bracket_rate * dt;
        now_ = t;
    }
}

void Recorder::record_event(const Event& ev) {
    if (cfg_.log_events) out_.events.push_back(ev);
}

Trajectory Recorder::finish(const Population& pop, const SimOptions& opts, EngineKind kind,
                            Trajectory::Stats stats, std::vector<std::string> warnings,
                            std::optional<double> extinction_time) {
    // Terminal points, unless a cadence boundary just emitted them.
    if (out_.snap_times.empty() || out_.snap_times.back() < t_end_ - 1e-12)
        emit_snapshot(t_end_, pop);
    if (out_.mass_times.empty() || out_.mass_times.back() < t_end_ - 1e-12)
        emit_mass_point(t_end_, pop);
    out_.t_end = t_end_;
    out_.seed = opts.seed;
    out_.engine = to_string(kind);
    out_.stats = stats;
    out_.warnings = std::move(warnings);
    out_.extinction_time = extinction_time;
    out_.final_atoms = pop.atoms();
    return std::move(out_);
}

}  // namespace ecoevo
