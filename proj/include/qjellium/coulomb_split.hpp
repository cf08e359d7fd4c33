#pragma once

// Decomposition of the Coulomb potential into ball-averaged pieces:
//   1/|x| = (1/pi) \int_0^inf dr r^{-5} J_r(x),
// where J_r(s) is the overlap volume of two balls of radius r whose centers sit
// a distance s apart.  Cutting the r-integral at R splits 1/s into a short-range
// part V_<R (supported in s < 2R) and a bounded positive-type long-range part
// V_>R.  Everything here is closed form; quadrature reconstructions live in the
// test suite as oracles.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "qjellium/errors.hpp"
#include "qjellium/numerics/quadrature.hpp"

namespace qjellium {

// J_r(s) = (pi/12) (2r - s)^2 (4r + s) for s <= 2r, else 0; J_r(0) = (4pi/3) r^3
inline double ball_overlap(double r, double s) {
    if (!(r > 0.0) || s < 0.0) throw domain_error("ball_overlap: need r > 0, s >= 0");
    if (s >= 2.0 * r) return 0.0;
    const double d = 2.0 * r - s;
    return M_PI / 12.0 * d * d * (4.0 * r + s);
}

// V_>R(s) = (1/pi) \int_R^inf r^{-5} J_r(s) dr
//         = 4/(3R) - s/(2R^2) + s^3/(48 R^4)   for s < 2R,   1/s otherwise.
// Bounded (value 4/(3R) at contact), monotone nonincreasing in s and in R.
inline double v_long(double s, double R) {
    if (!(R > 0.0) || s < 0.0) throw domain_error("v_long: need R > 0, s >= 0");
    if (s >= 2.0 * R) return 1.0 / s;
    return 4.0 / (3.0 * R) - s / (2.0 * R * R) + s * s * s / (48.0 * R * R * R * R);
}

namespace detail {

// s * V_<R(s) = 1 - s * V_>R(s) in the cancellation-free factored form
// (2R - s)^3 (s + 6R) / (48 R^4): the triple root at s = 2R is exact, which a
// direct 1 - s*v_long subtraction would destroy near contact of the supports.
inline double short_range_numerator(double s, double R) {
    if (s >= 2.0 * R) return 0.0;
    const double d = 2.0 * R - s;
    return d * d * d * (s + 6.0 * R) / (48.0 * R * R * R * R);
}

} // namespace detail

// V_<R(s) = 1/s - V_>R(s); identically 0 for s >= 2R, nonnegative below.
inline double v_short(double s, double R) {
    if (!(R > 0.0) || !(s > 0.0)) throw domain_error("v_short: need R > 0, s > 0");
    return detail::short_range_numerator(s, R) / s;
}

// Radial Fourier transform of the long-range piece, computed through the
// compactly supported short-range part so no regularization of the Coulomb tail
// is needed:
//   V^_>R(k) = 4 pi / k^2 - (4 pi / k) \int_0^{2R} sin(k s) [s V_<R(s)] ds.
inline double v_long_hat(double k, double R) {
    if (!(k > 0.0) || !(R > 0.0)) throw domain_error("v_long_hat: need k > 0, R > 0");
    auto t = [&](double s) { return detail::short_range_numerator(s, R); };
    const double T = num::integrate_oscillatory_sin(t, k, 2.0 * R);
    return 4.0 * M_PI / (k * k) - 4.0 * M_PI / k * T;
}

struct PositivityReport {
    double R = 1.0;
    double tol = 1e-8;
    std::size_t points = 0;
    double k_min = 0.0, k_max = 0.0;
    // scaled transform w(k) = k^2 V^_>R(k) / (4 pi): -> 1 as k -> 0, in [0, 1]
    double min_scaled = 0.0;
    double max_scaled = 0.0;
    double small_k_limit = 0.0; // w at the smallest grid k (Coulomb-tail check)
    bool certified = false;
    std::vector<double> violations_k;
};

// Samples w(k) = k^2 V^_>R(k) / (4 pi) on a geometric grid and certifies
// w >= -tol everywhere.  The k^2 weight keeps the criterion meaningful against
// the 4 pi / k^2 Coulomb tail at small k, where the raw transform diverges.
inline PositivityReport certify_positive_type(double R, std::size_t points = 400,
                                              double tol = 1e-8) {
    if (!(R > 0.0) || points < 2) throw domain_error("certify_positive_type: bad arguments");
    PositivityReport rep;
    rep.R = R;
    rep.tol = tol;
    rep.points = points;
    rep.k_min = 0.01 / R;
    rep.k_max = 200.0 / R;
    const double step = std::log(rep.k_max / rep.k_min) / double(points - 1);
    rep.min_scaled = std::numeric_limits<double>::infinity();
    rep.max_scaled = -rep.min_scaled;
    for (std::size_t i = 0; i < points; ++i) {
        const double k = rep.k_min * std::exp(double(i) * step);
        const double w = k * k * v_long_hat(k, R) / (4.0 * M_PI);
        if (i == 0) rep.small_k_limit = w;
        rep.min_scaled = std::min(rep.min_scaled, w);
        rep.max_scaled = std::max(rep.max_scaled, w);
        if (w < -tol) rep.violations_k.push_back(k);
    }
    rep.certified = rep.violations_k.empty();
    return rep;
}

} // namespace qjellium
