#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "qjellium/errors.hpp"

namespace qjellium::num {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // accumulated panel error estimate
};

namespace detail {

struct Segment {
    double a, b, value, error, l1;
    bool operator<(const Segment& o) const { return error < o.error; } // max-heap on error
};

template <class F>
Segment gk15_panel(F& f, double a, double b) {
    using rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    Segment s{a, b, 0.0, 0.0, 0.0};
    // max_depth = 0: single application of the (7,15) pair, returning the
    // embedded error estimate; all adaptivity lives in the flat driver below.
    s.value = rule::integrate(f, a, b, 0, 0.0, &s.error, &s.l1);
    // the library reports the error of the normalized [-1,1] integral; scale
    // by the half-width to put it in the same (absolute) units as value/l1
    s.error *= 0.5 * (b - a);
    return s;
}

} // namespace detail

// Globally adaptive Gauss-Kronrod (7,15): always refines the segment with the
// largest error estimate (QUADPACK-style), so endpoint singularities cost a
// panel chain instead of an exponential recursion tree.  `rel_tol` is measured
// against the integrand's L1 norm.  `noise_rel` declares the integrand's own
// relative evaluation-noise floor (e.g. from large-argument trig reduction);
// the driver never chases accuracy below it.  Throws numeric_error if the
// panel budget is exhausted far from the effective tolerance.
template <class F>
QuadResult integrate_gk(F&& f, double a, double b, double rel_tol = 1e-12,
                        std::size_t max_panels = 4000, double noise_rel = 0.0) {
    if (a == b) return {0.0, 0.0};
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    const double eff_tol = std::max(rel_tol, noise_rel);
    std::priority_queue<detail::Segment> heap; // refinable segments
    std::vector<double> settled_vals;          // segments at floating-point resolution
    auto seed = detail::gk15_panel(f, a, b);
    double err_sum = seed.error, l1_sum = seed.l1;
    heap.push(seed);
    std::size_t panels = 1;
    const double tiny = std::numeric_limits<double>::min();
    while (!heap.empty() && err_sum > eff_tol * std::max(l1_sum, tiny)) {
        if (panels >= max_panels) break; // budget exhausted; checked below
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) { // cannot subdivide further
            settled_vals.push_back(worst.value);
            continue;
        }
        const auto left = detail::gk15_panel(f, worst.a, mid);
        const auto right = detail::gk15_panel(f, mid, worst.b);
        err_sum += left.error + right.error - worst.error;
        l1_sum += left.l1 + right.l1 - worst.l1;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    {
        const double achieved = err_sum / std::max(l1_sum, tiny);
        if (achieved > 1e3 * eff_tol)
            throw numeric_error("adaptive quadrature failed to converge", achieved);
    }
    // compensated sum of the panel values
    std::vector<double> vals = std::move(settled_vals);
    vals.reserve(vals.size() + heap.size());
    while (!heap.empty()) {
        vals.push_back(heap.top().value);
        heap.pop();
    }
    double sum = 0.0, comp = 0.0;
    for (double v : vals) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return {sign * sum, err_sum};
}

template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12,
                 std::size_t max_panels = 4000) {
    return integrate_gk(std::forward<F>(f), a, b, rel_tol, max_panels).value;
}

// \int_0^{p_max} g(p) sin(p s) dp for oscillatory s: the range is split at the
// sign changes p = k pi / s so every panel sees half a period, then each panel
// is integrated adaptively and the panels are summed with compensation.  The
// per-panel noise floor accounts for the rounding of the phase argument p*s,
// which caps achievable relative accuracy at ~eps * (s * p_max).
// Fails (numeric_error) when the requested panel count is absurd -- callers are
// expected to truncate g's support first.
template <class F>
double integrate_oscillatory_sin(F&& g, double s, double p_max, double panel_rel_tol = 1e-13,
                                 std::size_t max_half_periods = 400000) {
    if (s <= 0.0) throw domain_error("oscillatory transform needs s > 0");
    if (p_max <= 0.0) return 0.0;
    const double period = M_PI / s;
    const auto n_panels = static_cast<std::size_t>(p_max / period) + 1;
    if (n_panels > max_half_periods)
        throw numeric_error("oscillatory quadrature panel count exploded", double(n_panels));

    const double eps = std::numeric_limits<double>::epsilon();
    const double noise_rel = 8.0 * eps * std::max(1.0, s * p_max);
    auto integrand = [&](double p) { return g(p) * std::sin(p * s); };
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < n_panels; ++k) {
        const double a = double(k) * period;
        const double b = std::min(double(k + 1) * period, p_max);
        if (b <= a) break;
        const double piece = integrate_gk(integrand, a, b, panel_rel_tol, 64, noise_rel).value;
        const double y = piece - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

} // namespace qjellium::num
