#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "qjellium/errors.hpp"

namespace qjellium::num {

// Bracketed root solve: keeps a sign-change interval at all times, proposes
// secant steps and falls back to bisection whenever a step leaves the bracket
// or fails to shrink it fast enough.
template <class F>
double solve_bracketed(F&& f, double lo, double hi, double x_rel_tol = 1e-14,
                       int max_iter = 200) {
    double fa = f(lo), fb = f(hi);
    if (fa == 0.0) return lo;
    if (fb == 0.0) return hi;
    if (std::signbit(fa) == std::signbit(fb))
        throw domain_error("solve_bracketed: endpoints do not bracket a root");

    double a = lo, b = hi;
    double x_prev = a, f_prev = fa, x = b, fx = fb;
    for (int it = 0; it < max_iter; ++it) {
        double mid = 0.5 * (a + b);
        double trial = mid;
        const double denom = fx - f_prev;
        if (denom != 0.0) {
            const double secant = x - fx * (x - x_prev) / denom;
            // accept the secant step only if it lands strictly inside the bracket
            if (secant > a && secant < b) trial = secant;
        }
        const double ft = f(trial);
        x_prev = x;
        f_prev = fx;
        x = trial;
        fx = ft;
        if (ft == 0.0) return trial;
        if (std::signbit(ft) == std::signbit(fa)) {
            a = trial;
            fa = ft;
        } else {
            b = trial;
            fb = ft;
        }
        if (b - a <= x_rel_tol * (std::abs(a) + std::abs(b) + 1e-300)) break;
    }
    return 0.5 * (a + b);
}

// Golden-section maximization of a unimodal-enough objective on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double x_tol = 1e-12,
                                     int max_iter = 300) {
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > x_tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

} // namespace qjellium::num
