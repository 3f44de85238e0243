#include "ecoevo/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ecoevo/numerics.hpp"

namespace ecoevo {

TraitGrid::TraitGrid(double lo_, double hi_, int cells_) : lo(lo_), hi(hi_), cells(cells_) {
    if (!(lo < hi)) throw ConfigError("trait grid needs lo < hi");
    if (cells < 16) throw ConfigError("trait grid needs at least 16 cells");
}

double equilibrium_nbar(const ModelSpec& model, double x) {
    const double u0 = (*model.U)(0.0);
    const double v0 = (*model.V)(0.0);
    if (model.ll) {
        const double b = model.ll->b0(x);
        const double d = model.ll->d0(x);
        const double denom = model.ll->alpha(x) * u0;
        if (!(b - d > 0.0) || !(denom > 0.0)) {
            std::ostringstream os;
            os << "no positive equilibrium at x = " << x << " (b - d = " << b - d
               << ", alpha*U(0) = " << denom << ")";
            throw NoPositiveEquilibrium(os.str());
        }
        return (b - d) / denom;
    }
    auto g = [&](double n) { return model.birth(x, v0 * n) - model.death(x, u0 * n); };
    if (!(g(0.0) > 0.0))
        throw NoPositiveEquilibrium("population not viable at zero density, x = " + std::to_string(x));
    double hi = 1.0;
    int grow = 0;
    while (g(hi) > 0.0) {
        hi *= 2.0;
        if (++grow > 200)
            throw NoPositiveEquilibrium("growth rate never turns negative, x = " + std::to_string(x));
    }
    double lo = hi * 0.5;  // bracket is [lo, hi] with g(lo) > 0
    if (g(lo) <= 0.0) lo = 0.0;
    for (int it = 0; it < 500; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) < 1e-10) return mid;
        (gm > 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-300) break;
    }
    const double mid = 0.5 * (lo + hi);
    if (std::abs(g(mid)) < 1e-8) return mid;  // flat crossing; still a root to 1e-8
    throw NoPositiveEquilibrium("bisection failed to localize the equilibrium at x = " +
                                std::to_string(x));
}

namespace {

OdeSeries record_series(const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f,
                        const std::vector<double>& y0, double t_end, const OdeOptions& opts) {
    // Step-doubling runs independently on every recording segment, so each
    // recorded state is validated locally.  A single whole-horizon step
    // budget spread over the segments is not safe: a trajectory that has
    // settled needs almost no steps for accuracy, but replaying it with one
    // huge step per segment can sit outside the stability region of the
    // stepper and walk off the equilibrium.
    const int pts = std::max(2, opts.record_points);
    OdeSeries out;
    std::vector<double> y = y0;
    out.times.push_back(0.0);
    out.values.push_back(y);
    for (int i = 1; i <= pts; ++i) {
        const double t0 = t_end * (i - 1) / pts;
        const double t1 = t_end * i / pts;
        Rk4Result seg = rk4_adaptive(f, y, t0, t1, opts.rel_tol, 8);
        y = std::move(seg.y);
        out.steps_used += seg.steps;
        out.times.push_back(t1);
        out.values.push_back(y);
    }
    return out;
}

}  // namespace

OdeSeries solve_monomorphic(const ModelSpec& model, double x, double n0, double t_end,
                            const OdeOptions& opts) {
    const double u0 = (*model.U)(0.0);
    const double v0 = (*model.V)(0.0);
    auto f = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        const double n = y[0];
        dy[0] = n * (model.birth(x, v0 * n) - model.death(x, u0 * n));
    };
    return record_series(f, {n0}, t_end, opts);
}

OdeSeries solve_dimorphic(const ModelSpec& model, double x1, double x2, double n1_0,
                          double n2_0, double t_end, const OdeOptions& opts) {
    const double u0 = (*model.U)(0.0), v0 = (*model.V)(0.0);
    const double u12 = (*model.U)(x1 - x2), u21 = (*model.U)(x2 - x1);
    const double v12 = (*model.V)(x1 - x2), v21 = (*model.V)(x2 - x1);
    auto f = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        const double n1 = y[0], n2 = y[1];
        dy[0] = n1 * (model.birth(x1, v0 * n1 + v12 * n2) - model.death(x1, u0 * n1 + u12 * n2));
        dy[1] = n2 * (model.birth(x2, v21 * n1 + v0 * n2) - model.death(x2, u21 * n1 + u0 * n2));
    };
    return record_series(f, {n1_0, n2_0}, t_end, opts);
}

double FieldSolution::mass_at(std::size_t ti) const {
    double m = 0.0;
    for (int i = 0; i < grid.nodes(); ++i) m += grid.weight(i) * xi[ti][static_cast<std::size_t>(i)];
    return m;
}

namespace {

/// Shared state for the nonlocal field solvers: kernel matrices and the
/// reaction evaluation.
struct FieldWork {
    const ModelSpec* model;
    TraitGrid grid;
    int N;  // nodes
    std::vector<double> w;        // trapezoid weights
    std::vector<double> ku;       // ku[i*N+j] = U(x_i - x_j) w_j
    std::vector<double> kv;       // only when birth uses interaction
    std::vector<double> mt;       // mt[j*N+i] = M(x_i, x_j) w_i (mutant inflow)
    std::vector<double> mu, rr, xs;
    bool use_v;
    IdeMode mode;
    bool with_mutation;   // standard IDE: mutation terms present

    std::vector<double> zu, zv, src;  // scratch

    FieldWork(const ModelSpec& m, const TraitGrid& g, IdeMode mode_, bool with_mut,
              const std::function<double(double)>& turnover)
        : model(&m), grid(g), N(g.nodes()), mode(mode_), with_mutation(with_mut) {
        use_v = m.birth_uses_interaction;
        w.resize(N);
        xs.resize(N);
        mu.resize(N);
        rr.resize(N);
        for (int i = 0; i < N; ++i) {
            xs[i] = g.node(i);
            w[i] = g.weight(i);
            mu[i] = m.mu(xs[i]);
            rr[i] = turnover ? turnover(xs[i]) : 1.0;
        }
        ku.resize(static_cast<std::size_t>(N) * N);
        if (use_v) kv.resize(static_cast<std::size_t>(N) * N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                ku[static_cast<std::size_t>(i) * N + j] = (*m.U)(xs[i] - xs[j]) * w[j];
                if (use_v) kv[static_cast<std::size_t>(i) * N + j] = (*m.V)(xs[i] - xs[j]) * w[j];
            }
        if (with_mutation) {
            mt.resize(static_cast<std::size_t>(N) * N);
            for (int j = 0; j < N; ++j)
                for (int i = 0; i < N; ++i)
                    mt[static_cast<std::size_t>(j) * N + i] = m.mutation.density(xs[i], xs[j]) * w[i];
        }
        zu.resize(N);
        zv.resize(N);
        src.resize(N);
    }

    /// Reaction right-hand side (growth + mutant inflow) into dy.
    void reaction(const std::vector<double>& y, std::vector<double>& dy) {
        for (int i = 0; i < N; ++i) {
            double s = 0.0;
            const double* row = &ku[static_cast<std::size_t>(i) * N];
            for (int j = 0; j < N; ++j) s += row[j] * y[static_cast<std::size_t>(j)];
            zu[i] = s;
        }
        if (use_v) {
            for (int i = 0; i < N; ++i) {
                double s = 0.0;
                const double* row = &kv[static_cast<std::size_t>(i) * N];
                for (int j = 0; j < N; ++j) s += row[j] * y[static_cast<std::size_t>(j)];
                zv[i] = s;
            }
        } else {
            std::fill(zv.begin(), zv.end(), 0.0);
        }
        for (int i = 0; i < N; ++i) {
            const double b = model->birth(xs[i], zv[i]);
            const double d = model->death(xs[i], zu[i]);
            const double xi = y[static_cast<std::size_t>(i)];
            if (with_mutation) {
                if (mode == IdeMode::standard) {
                    dy[static_cast<std::size_t>(i)] = ((1.0 - mu[i]) * b - d) * xi;
                    src[i] = mu[i] * b * xi;
                } else {
                    dy[static_cast<std::size_t>(i)] = (b - d) * xi;
                    src[i] = mu[i] * rr[i] * xi;
                }
            } else {
                dy[static_cast<std::size_t>(i)] = (b - d) * xi;
            }
        }
        if (with_mutation) {
            for (int j = 0; j < N; ++j) {
                double s = 0.0;
                const double* row = &mt[static_cast<std::size_t>(j) * N];
                for (int i = 0; i < N; ++i) s += row[i] * src[i];
                dy[static_cast<std::size_t>(j)] += s;
            }
        }
    }
};

struct Attempt {
    std::vector<std::vector<double>> frames;
    std::vector<double> times;
    double clipped = 0.0;
};

/// Fixed-dt RK4 pass with negativity clipping and frame recording.
Attempt run_field(FieldWork& work, const std::vector<double>& xi0, double t_end, double dt,
                  int record_points, const std::function<void(const std::vector<double>&, std::vector<double>&)>& rhs,
                  double clip_fraction) {
    const int frames = std::max(1, record_points);
    Attempt out;
    std::vector<double> y = xi0;
    out.times.push_back(0.0);
    out.frames.push_back(y);
    const int N = work.N;
    std::vector<double> k1(N), k2(N), k3(N), k4(N), tmp(N);
    for (int fseg = 1; fseg <= frames; ++fseg) {
        const double t0 = t_end * (fseg - 1) / frames;
        const double t1 = t_end * fseg / frames;
        const int steps = std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt - 1e-12)));
        const double h = (t1 - t0) / steps;
        for (int s = 0; s < steps; ++s) {
            rhs(y, k1);
            for (int i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
            rhs(tmp, k2);
            for (int i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
            rhs(tmp, k3);
            for (int i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
            rhs(tmp, k4);
            double mass = 0.0, clipped = 0.0;
            for (int i = 0; i < N; ++i) {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                if (!(y[i] > -1e300 && y[i] < 1e300))
                    throw NegativeDensityBlowup("field solution diverged (non-finite density)");
                if (y[i] < 0.0) {
                    clipped -= y[i] * work.w[i];
                    y[i] = 0.0;
                }
                mass += y[i] * work.w[i];
            }
            out.clipped += clipped;
            if (out.clipped > clip_fraction * std::max(mass, 1e-12))
                throw NegativeDensityBlowup("clipped negative mass " + std::to_string(out.clipped) +
                                            " exceeds the tolerated fraction of total mass " +
                                            std::to_string(mass));
        }
        out.times.push_back(t1);
        out.frames.push_back(y);
    }
    return out;
}

double frame_distance(const Attempt& a, const Attempt& b, const FieldWork& work) {
    double diff = 0.0, scale = 1e-12;
    const auto& fa = a.frames.back();
    const auto& fb = b.frames.back();
    for (int i = 0; i < work.N; ++i) {
        diff += std::abs(fa[i] - fb[i]) * work.w[i];
        scale += std::abs(fb[i]) * work.w[i];
    }
    return diff / scale;
}

FieldSolution assemble(FieldWork& work, const std::vector<double>& xi0, double t_end,
                       const FieldOptions& opts,
                       const std::function<void(const std::vector<double>&, std::vector<double>&)>& rhs,
                       double dt_cap) {
    if (static_cast<int>(xi0.size()) != work.N)
        throw ConfigError("initial density size does not match the grid");
    double dt = opts.forced_dt > 0.0 ? opts.forced_dt : std::min(opts.dt0, dt_cap);
    Attempt cur = run_field(work, xi0, t_end, dt, opts.record_points, rhs, opts.clip_fraction);
    if (opts.forced_dt <= 0.0) {
        for (int halves = 0; halves < 24; ++halves) {
            Attempt finer =
                run_field(work, xi0, t_end, dt * 0.5, opts.record_points, rhs, opts.clip_fraction);
            const double err = frame_distance(cur, finer, work);
            cur = std::move(finer);
            dt *= 0.5;
            if (err <= opts.rel_tol) break;
            if (halves == 23)
                throw QuadratureFailure("field step-doubling failed to meet its tolerance");
        }
    }
    FieldSolution sol;
    sol.grid = work.grid;
    sol.times = std::move(cur.times);
    sol.xi = std::move(cur.frames);
    sol.dt_used = dt;
    sol.clipped_mass = cur.clipped;
    return sol;
}

}  // namespace

FieldSolution solve_ide(const ModelSpec& model, const TraitGrid& grid,
                        const std::vector<double>& xi0, double t_end, IdeMode mode,
                        const FieldOptions& opts) {
    FieldWork work(model, grid, mode, true, opts.turnover);
    auto rhs = [&](const std::vector<double>& y, std::vector<double>& dy) { work.reaction(y, dy); };
    return assemble(work, xi0, t_end, opts, rhs, 1e30);
}

FieldSolution solve_rd_pde(const ModelSpec& model, const TraitGrid& grid,
                           const std::vector<double>& xi0, double t_end,
                           const std::function<double(double)>& c, const FieldOptions& opts) {
    FieldWork work(model, grid, IdeMode::standard, false, {});
    const int N = work.N;
    const double dx = grid.dx();
    std::vector<double> cv(N);
    double cmax = 0.0;
    for (int i = 0; i < N; ++i) {
        cv[i] = c(grid.node(i));
        if (cv[i] < 0.0) throw ConfigError("diffusion coefficient must be nonnegative");
        cmax = std::max(cmax, cv[i]);
    }
    const double dt_cap = cmax > 0.0 ? 0.4 * dx * dx / cmax : 1e30;
    if (opts.forced_dt > dt_cap) {
        std::ostringstream os;
        os << "explicit step " << opts.forced_dt << " exceeds the diffusion stability bound "
           << dt_cap;
        throw CFLViolation(os.str());
    }
    std::vector<double> wv(N);
    auto rhs = [&](const std::vector<double>& y, std::vector<double>& dy) {
        work.reaction(y, dy);
        // Diffusion of w = c xi in flux form with zero-flux ends; boundary
        // nodes own half cells, which keeps the trapezoid mass exact.
        for (int i = 0; i < N; ++i) wv[i] = cv[i] * y[static_cast<std::size_t>(i)];
        for (int i = 0; i < N; ++i) {
            const double fl = i == 0 ? 0.0 : (wv[i] - wv[i - 1]) / dx;
            const double fr = i == N - 1 ? 0.0 : (wv[i + 1] - wv[i]) / dx;
            const double cell = (i == 0 || i == N - 1) ? 0.5 * dx : dx;
            dy[static_cast<std::size_t>(i)] += 0.5 * (fr - fl) / cell;
        }
    };
    return assemble(work, xi0, t_end, opts, rhs, dt_cap);
}

}  // namespace ecoevo
