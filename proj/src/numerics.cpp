#include "ecoevo/numerics.hpp"

#include <cmath>
#include <cstddef>

namespace ecoevo {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b,
               double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b,
                double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, m, fm, lm, flm);
    const double right = simpson(f, m, fm, b, fb, rm, frm);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw QuadratureFailure("adaptive quadrature depth exhausted");
    return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
    const double whole = simpson(f, a, fa, b, fb, m, fm);
    return adaptive(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

void gauss_legendre_32(double a, double b, std::vector<double>& xs, std::vector<double>& ws) {
    // Abscissas/weights for n = 32 on [-1, 1], positive half; mirrored below.
    static const double x[16] = {
        0.0483076656877383162, 0.1444719615827964934, 0.2392873622521370745,
        0.3318686022821276497, 0.4213512761306353454, 0.5068999089322293900,
        0.5877157572407623290, 0.6630442669302152009, 0.7321821187402896804,
        0.7944837959679424070, 0.8493676137325699701, 0.8963211557660521240,
        0.9349060759377396892, 0.9647622555875064307, 0.9856115115452683354,
        0.9972638618494815635};
    static const double w[16] = {
        0.0965400885147278006, 0.0956387200792748594, 0.0938443990808045654,
        0.0911738786957638847, 0.0876520930044038111, 0.0833119242269467552,
        0.0781938957870703065, 0.0723457941088485062, 0.0658222227763618468,
        0.0586840934785355471, 0.0509980592623761762, 0.0428358980222266807,
        0.0342738629130214331, 0.0253920653092620595, 0.0162743947309056706,
        0.0070186100094700966};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < 16; ++i) {
        xs.push_back(mid - half * x[i]);
        ws.push_back(half * w[i]);
        xs.push_back(mid + half * x[i]);
        ws.push_back(half * w[i]);
    }
}

void rk4_fixed(const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f,
               std::vector<double>& y, double t0, double t1, int steps) {
    const std::size_t n = y.size();
    const double h = (t1 - t0) / steps;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    double t = t0;
    for (int s = 0; s < steps; ++s) {
        f(t, y, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        f(t + 0.5 * h, tmp, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        f(t + 0.5 * h, tmp, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        f(t + h, tmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = t0 + (s + 1) * h;
    }
}

Rk4Result rk4_adaptive(const std::function<void(double, const std::vector<double>&, std::vector<double>&)>& f,
                       const std::vector<double>& y0, double t0, double t1, double rel_tol,
                       int initial_steps, int max_doublings) {
    std::vector<double> coarse = y0;
    rk4_fixed(f, coarse, t0, t1, initial_steps);
    int steps = initial_steps;
    for (int d = 0; d < max_doublings; ++d) {
        std::vector<double> fine = y0;
        rk4_fixed(f, fine, t0, t1, steps * 2);
        double scale = 1e-300, diff = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            finite = finite && std::isfinite(fine[i]);
            scale = std::max(scale, std::abs(fine[i]));
            diff = std::max(diff, std::abs(fine[i] - coarse[i]));
        }
        // A non-finite solution never counts as agreement, even when the
        // coarse run overflowed to the identical values.
        if (finite && diff <= rel_tol * scale) return {fine, steps * 2};
        coarse = std::move(fine);
        steps *= 2;
    }
    throw QuadratureFailure("step-doubling failed to converge");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace ecoevo
