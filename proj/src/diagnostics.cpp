#include "ecoevo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ecoevo/engine.hpp"
#include "ecoevo/ensemble.hpp"
#include "ecoevo/numerics.hpp"
#include "ecoevo/stats.hpp"

namespace ecoevo {

namespace {

std::size_t last_index_at_or_before(const std::vector<double>& times, double t) {
    if (times.empty()) throw Error("trajectory track is empty");
    auto it = std::upper_bound(times.begin(), times.end(), t + 1e-12);
    if (it == times.begin()) throw Error("evaluation time precedes the first recorded point");
    return static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
}

/// Trapezoid integral of samples[0..idx] on the matching time grid, plus a
/// Richardson error estimate from comparing against the every-other-sample
/// rule.
struct TrapResult {
    double value;
    double error;
};

TrapResult trapezoid_with_error(const std::vector<double>& t, const std::vector<double>& y,
                                std::size_t idx) {
    double full = 0.0;
    for (std::size_t i = 1; i <= idx; ++i)
        full += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
    if (idx < 2) return {full, std::abs(full)};  // too few points to estimate
    double coarse = 0.0;
    std::size_t prev = 0;
    for (std::size_t i = 2; i <= idx; i += 2) {
        coarse += 0.5 * (y[i] + y[prev]) * (t[i] - t[prev]);
        prev = i;
    }
    if (prev != idx) coarse += 0.5 * (y[idx] + y[prev]) * (t[idx] - t[prev]);
    return {full, std::abs(full - coarse) / 3.0};
}

const ProbeTrack& find_probe(const Trajectory& tr, const std::string& name) {
    for (const ProbeTrack& p : tr.probes)
        if (p.name == name) return p;
    throw Error("trajectory has no probe named '" + name + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// martingale residual
// ---------------------------------------------------------------------------

MartingaleReport martingale_residual(const std::vector<Trajectory>& ensemble,
                                     const std::string& probe, double t_eval) {
    if (ensemble.empty()) throw Error("martingale residual needs a nonempty ensemble");
    const int R = static_cast<int>(ensemble.size());
    std::vector<double> resid(static_cast<std::size_t>(R));
    std::vector<double> brackets(static_cast<std::size_t>(R));
    double quad_err = 0.0;
    double snapped_t = t_eval;

    for (int r = 0; r < R; ++r) {
        const Trajectory& tr = ensemble[static_cast<std::size_t>(r)];
        if (probe == "1") {
            const std::size_t i = last_index_at_or_before(tr.mass_times, t_eval);
            if (r == 0) snapped_t = tr.mass_times[i];
            resid[static_cast<std::size_t>(r)] = tr.mass[i] - tr.mass[0] - tr.drift1[i];
            brackets[static_cast<std::size_t>(r)] = tr.bracket1[i];
        } else {
            const ProbeTrack& p = find_probe(tr, probe);
            const std::size_t i = last_index_at_or_before(tr.snap_times, t_eval);
            if (r == 0) snapped_t = tr.snap_times[i];
            const TrapResult drift = trapezoid_with_error(tr.snap_times, p.drift, i);
            const TrapResult brk = trapezoid_with_error(tr.snap_times, p.bracket, i);
            resid[static_cast<std::size_t>(r)] = p.value[i] - p.value[0] - drift.value;
            brackets[static_cast<std::size_t>(r)] = brk.value;
            quad_err += drift.error + brk.error;
        }
    }

    MartingaleReport rep;
    rep.probe = probe;
    // Report the track time actually used, not the requested one: downstream
    // consumers compare residuals against brackets at this exact instant.
    rep.t_eval = snapped_t;
    rep.replicates = R;
    rep.mean_residual = mean(resid);
    rep.var_residual = R > 1 ? variance(resid) : 0.0;
    rep.se_residual = R > 1 ? std::sqrt(rep.var_residual / R) : 0.0;
    rep.zscore = rep.se_residual > 0.0 ? std::abs(rep.mean_residual) / rep.se_residual : 0.0;
    rep.zero_mean_pass = rep.zscore <= 3.0;
    rep.predicted_bracket = mean(brackets);
    rep.quadrature_error = quad_err / R;
    if (probe != "1" && rep.predicted_bracket > 0.0 &&
        rep.quadrature_error > 0.1 * rep.predicted_bracket)
        throw InsufficientCadence(
            "probe quadrature error " + std::to_string(rep.quadrature_error) +
            " exceeds 10% of the predicted bracket " + std::to_string(rep.predicted_bracket) +
            "; record snapshots more often");
    if (rep.predicted_bracket > 0.0) {
        rep.ratio = rep.var_residual / rep.predicted_bracket;
        const double se_ratio = R > 1 ? rep.ratio * std::sqrt(2.0 / (R - 1)) : 0.0;
        rep.ratio_low = rep.ratio - 2.0 * se_ratio;
        rep.ratio_high = rep.ratio + 2.0 * se_ratio;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// first-moment identity
// ---------------------------------------------------------------------------

MomentReport moment_identity_check(const std::vector<Trajectory>& ensemble) {
    if (ensemble.empty()) throw Error("moment identity needs a nonempty ensemble");
    const std::vector<double>& times = ensemble.front().mass_times;
    const std::size_t n = times.size();
    if (n < 3) throw Error("moment identity needs at least three mass points");
    for (const Trajectory& tr : ensemble) {
        if (tr.mass_times.size() != n)
            throw Error("ensemble trajectories disagree on the mass cadence");
        if (tr.base_term.size() != n || tr.pair_term.size() != n)
            throw Error("moment identity needs the affine drift split recorded "
                        "(affine_terms in the recorder configuration)");
    }
    const double R = static_cast<double>(ensemble.size());
    std::vector<double> m(n, 0.0), g(n, 0.0);
    for (const Trajectory& tr : ensemble)
        for (std::size_t i = 0; i < n; ++i) {
            m[i] += tr.mass[i] / R;
            g[i] += (tr.base_term[i] - tr.pair_term[i]) / R;
        }
    MomentReport rep;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dt = times[i + 1] - times[i - 1];
        rep.times.push_back(times[i]);
        rep.lhs.push_back((m[i + 1] - m[i - 1]) / dt);
        rep.rhs.push_back(g[i]);
    }
    for (std::size_t i = 0; i < rep.lhs.size(); ++i) {
        rep.max_abs_error = std::max(rep.max_abs_error, std::abs(rep.lhs[i] - rep.rhs[i]));
        rep.scale = std::max(rep.scale, std::abs(rep.rhs[i]));
    }
    rep.relative_error = rep.scale > 0.0 ? rep.max_abs_error / rep.scale : rep.max_abs_error;
    return rep;
}

// ---------------------------------------------------------------------------
// transport distance
// ---------------------------------------------------------------------------

double wasserstein1(WeightedSample a, WeightedSample b, bool normalize) {
    if (a.x.size() != a.w.size() || b.x.size() != b.w.size())
        throw Error("weighted sample has mismatched positions and weights");
    if (a.x.empty() || b.x.empty()) throw Error("wasserstein1 needs nonempty samples");
    const double wa = std::accumulate(a.w.begin(), a.w.end(), 0.0);
    const double wb = std::accumulate(b.w.begin(), b.w.end(), 0.0);
    if (!(wa > 0.0) || !(wb > 0.0)) throw MassMismatch("wasserstein1 needs positive total mass");
    double sa = 1.0, sb = 1.0;
    if (normalize) {
        sa = 1.0 / wa;
        sb = 1.0 / wb;
    } else if (std::abs(wa - wb) > 1e-9 * std::max(wa, wb)) {
        throw MassMismatch("total masses differ: " + std::to_string(wa) + " vs " +
                           std::to_string(wb));
    }
    auto order = [](WeightedSample& s) {
        std::vector<std::size_t> idx(s.x.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return s.x[i] < s.x[j]; });
        WeightedSample out;
        out.x.reserve(idx.size());
        out.w.reserve(idx.size());
        for (std::size_t i : idx) {
            out.x.push_back(s.x[i]);
            out.w.push_back(s.w[i]);
        }
        s = std::move(out);
    };
    order(a);
    order(b);
    // Sweep the merged support; W1 = integral |F_a - F_b|.
    double fa = 0.0, fb = 0.0, w1 = 0.0;
    std::size_t i = 0, j = 0;
    double prev = std::min(a.x.front(), b.x.front());
    while (i < a.x.size() || j < b.x.size()) {
        const double xi = i < a.x.size() ? a.x[i] : std::numeric_limits<double>::infinity();
        const double xj = j < b.x.size() ? b.x[j] : std::numeric_limits<double>::infinity();
        const double x = std::min(xi, xj);
        w1 += std::abs(fa - fb) * (x - prev);
        while (i < a.x.size() && a.x[i] == x) fa += a.w[i++] * sa;
        while (j < b.x.size() && b.x[j] == x) fb += b.w[j++] * sb;
        prev = x;
    }
    return w1;
}

double wasserstein1_points(const std::vector<double>& a, const std::vector<double>& b) {
    WeightedSample wa{a, std::vector<double>(a.size(), 1.0)};
    WeightedSample wb{b, std::vector<double>(b.size(), 1.0)};
    return wasserstein1(std::move(wa), std::move(wb), true);
}

// ---------------------------------------------------------------------------
// fluctuation scaling study
// ---------------------------------------------------------------------------

ScalingReport scaling_study(const ModelSpec& model, const std::vector<double>& Ks,
                            double x0, IdeMode mode, const ScalingStudyOptions& opts) {
    if (Ks.size() < 2) throw ConfigError("scaling study needs at least two capacities");
    ScalingReport report;
    report.t_probe = opts.t_probe;
    const double nbar = equilibrium_nbar(model, x0);

    // Field reference: the initial point mass sits on the nearest grid node.
    TraitGrid grid(model.space.lo, model.space.hi, 256);
    std::vector<double> xi0(static_cast<std::size_t>(grid.nodes()), 0.0);
    int j0 = static_cast<int>(std::lround((x0 - grid.lo) / grid.dx()));
    j0 = std::clamp(j0, 0, grid.nodes() - 1);
    xi0[static_cast<std::size_t>(j0)] = nbar / grid.weight(j0);
    FieldOptions fopts;
    fopts.record_points = 8;
    const FieldSolution field = solve_ide(model, grid, xi0, opts.t_probe, mode, fopts);
    WeightedSample limit;
    for (int i = 0; i < grid.nodes(); ++i) {
        const double w = grid.weight(i) * field.xi.back()[static_cast<std::size_t>(i)];
        if (w > 0.0) {
            limit.x.push_back(grid.node(i));
            limit.w.push_back(w);
        }
    }

    std::vector<double> lnK, lnVar;
    for (std::size_t ki = 0; ki < Ks.size(); ++ki) {
        const double K = Ks[ki];
        ScalingSpec scaling;
        scaling.mode = ScalingMode::capacity;
        scaling.K = K;
        const long long n0 = std::llround(K * nbar);
        if (n0 < 1) throw ConfigError("capacity too small: initial count rounds to zero");

        std::vector<double> masses(static_cast<std::size_t>(opts.replicates));
        std::vector<std::vector<double>> hists(static_cast<std::size_t>(opts.replicates));
        std::vector<double> edges(static_cast<std::size_t>(opts.bins) + 1, 0.0);
        RecorderConfig rc;
        rc.snapshot_dt = opts.t_probe;
        rc.bins = opts.bins;
        rc.mass_dt = opts.mass_dt;
        run_ensemble(opts.replicates, opts.workers,
                     [&](int r, std::uint64_t rep_seed) {
                         SimOptions so;
                         so.seed = rep_seed;
                         so.t_end = opts.t_probe;
                         so.validate = r == 0;  // identical spec; probe it once
                         Trajectory tr = simulate(model, scaling, {{x0, n0}}, so, rc);
                         renormalize(tr);
                         masses[static_cast<std::size_t>(r)] = tr.mass.back();
                         hists[static_cast<std::size_t>(r)] = tr.histogram.back();
                         if (r == 0) edges = tr.bin_edges;
                     },
                     opts.seed + ki);

        ScalingRow row;
        row.K = K;
        row.replicates = opts.replicates;
        row.mean_mass = mean(masses);
        row.var_mass = variance(masses);
        std::vector<double> hist(hists.front().size(), 0.0);
        for (const auto& h : hists)
            for (std::size_t b = 0; b < h.size(); ++b) hist[b] += h[b] / opts.replicates;
        WeightedSample emp;
        for (std::size_t b = 0; b < hist.size(); ++b)
            if (hist[b] > 0.0) {
                emp.x.push_back(0.5 * (edges[b] + edges[b + 1]));
                emp.w.push_back(hist[b]);
            }
        row.w1_vs_limit = emp.x.empty() ? std::numeric_limits<double>::quiet_NaN()
                                        : wasserstein1(std::move(emp), limit, true);
        report.rows.push_back(row);
        lnK.push_back(std::log(K));
        lnVar.push_back(std::log(std::max(row.var_mass, 1e-300)));
    }
    report.slope = fit_slope(lnK, lnVar);
    return report;
}

}  // namespace ecoevo
