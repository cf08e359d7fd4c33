#pragma once

// Smooth localization cutoff eta with nonnegative Fourier transform, built by
// convolving a radial C-infinity bump psi (supported in |x| < 1/2) with itself
// and normalizing:
//   eta = (psi * psi) / (psi * psi)(0),
// so that eta(0) = 1, eta(s) = 0 for s >= 1, |eta| <= 1 (Cauchy-Schwarz), and
//   eta^(k) = psi^(k)^2 / (psi * psi)(0) >= 0   manifestly.
// The scaled cutoff eta_d(s) = eta(s/d) has transform d^3 eta^(k d).

#include <cmath>
#include <cstddef>
#include <vector>

#include "qjellium/errors.hpp"
#include "qjellium/numerics/quadrature.hpp"
#include "qjellium/radial_profile.hpp"

namespace qjellium {

namespace detail {

// radial bump, supported in r < 1/2, value e^{-1} at the origin
inline double eta_bump(double r) {
    const double x = 2.0 * r;
    if (x >= 1.0 || r < 0.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

// (4 pi / k) \int r sin(k r) p(r) dr for a tabulated profile, integrating
// cell-by-cell on the profile's own grid: the spline is C-infinity inside a
// cell, so no quadrature panel ever straddles a knot.
inline double radial_sin_transform(const RadialProfile& p, double k) {
    if (!(k > 0.0)) throw domain_error("radial_sin_transform: need k > 0");
    const auto& g = p.grid();
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double cell = num::integrate(
            [&](double r) { return r * std::sin(k * r) * p(r); }, g[i], g[i + 1], 1e-12, 8);
        const double y = cell - comp, t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return 4.0 * M_PI / k * sum;
}

} // namespace detail

class EtaCutoff {
public:
    // unit-scale profile eta on [0,1] and its radial Fourier transform on
    // [0, k_max]; beyond k_max the transform is below 1e-12 of its k=0 value
    // and treated as zero
    EtaCutoff(RadialProfile profile, RadialProfile fourier, double d, double L)
        : profile_(std::move(profile)), fourier_(std::move(fourier)), d_(d), L_(L) {
        if (!(d > 0.0)) throw domain_error("EtaCutoff: need d > 0");
        if (L != 0.0 && !(2.0 * d <= L))
            throw domain_error("EtaCutoff: periodization needs 2 d <= L");
    }

    // eta_d(s) = eta(s / d)
    double operator()(double s) const { return profile_(s / d_); }
    // eta^_d(k) = d^3 eta^(k d)
    double fourier(double k) const {
        if (k < 0.0) throw domain_error("EtaCutoff::fourier: need k >= 0");
        return d_ * d_ * d_ * fourier_(k * d_);
    }

    double scale() const { return d_; }
    double period() const { return L_; }
    double fourier_cutoff() const { return fourier_.grid().back() / d_; }
    const RadialProfile& unit_profile() const { return profile_; }
    const RadialProfile& unit_fourier() const { return fourier_; }

private:
    RadialProfile profile_;
    RadialProfile fourier_;
    double d_;
    double L_;
};

// Constructs the cutoff at scale d (optionally tied to a periodic box of side
// L >= 2d) and verifies every invariant: eta(0) = 1, support in [0,1],
// 0 <= eta <= 1, and a sampled nonnegative Fourier transform.  Construction
// failure throws consistency_error.
inline EtaCutoff build_eta(double d = 1.0, double L = 0.0) {
    struct UnitTables {
        std::vector<double> grid, values, k_grid, k_values;
    };
    static const UnitTables tab = [] {
        UnitTables t;
        auto inner = [](double lo, double hi) {
            lo = std::max(lo, 0.0);
            hi = std::min(hi, 0.5);
            if (hi <= lo) return 0.0;
            return num::integrate([](double u) { return u * detail::eta_bump(u); }, lo, hi,
                                  1e-12);
        };
        // (psi * psi)(r) = (2 pi / r) \int_0^{1/2} u psi(u) \int_{|r-u|}^{r+u} t psi(t) dt du
        auto conv = [&](double r) {
            if (r == 0.0)
                return 4.0 * M_PI *
                       num::integrate([](double u) {
                           const double b = detail::eta_bump(u);
                           return u * u * b * b;
                       }, 0.0, 0.5, 1e-12);
            if (r >= 1.0) return 0.0;
            auto outer = [&](double u) {
                const double b = detail::eta_bump(u);
                if (b == 0.0) return 0.0;
                return u * b * inner(std::abs(r - u), r + u);
            };
            // the integrand carries ~1e-12 evaluation noise from the nested
            // adaptive inner integral; declare it so refinement stops there
            return 2.0 * M_PI / r *
                   num::integrate_gk(outer, std::max(0.0, r - 0.5), 0.5, 1e-11, 4000, 1e-12)
                       .value;
        };
        const std::size_t n = 1024;
        t.grid.resize(n);
        t.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) t.grid[i] = double(i) / double(n - 1);
        const double norm = conv(0.0);
        for (std::size_t i = 0; i < n; ++i) t.values[i] = conv(t.grid[i]) / norm;
        t.values[0] = 1.0;          // exact by normalization
        t.values[n - 1] = 0.0;      // exact: supports only touch at r = 1

        // psi^(k) = (4 pi / k) \int_0^{1/2} r sin(k r) psi(r) dr;  eta^ = psi^2 / norm
        auto psi_hat = [](double k) {
            auto rpsi = [](double r) { return r * detail::eta_bump(r); };
            if (k == 0.0)
                return 4.0 * M_PI *
                       num::integrate([](double r) {
                           return r * r * detail::eta_bump(r);
                       }, 0.0, 0.5, 1e-13);
            return 4.0 * M_PI / k * num::integrate_oscillatory_sin(rpsi, k, 0.5);
        };
        const double k_max = 240.0;
        const std::size_t nk = 1600;
        t.k_grid.resize(nk);
        t.k_values.resize(nk);
        for (std::size_t i = 0; i < nk; ++i) {
            t.k_grid[i] = k_max * double(i) / double(nk - 1);
            const double ph = psi_hat(t.k_grid[i]);
            t.k_values[i] = ph * ph / norm;
        }
        return t;
    }();

    EtaCutoff eta(RadialProfile(tab.grid, tab.values), RadialProfile(tab.k_grid, tab.k_values),
                  d, L);

    // invariant sweep on the unit profile
    for (double v : eta.unit_profile().values())
        if (v < -1e-14 || v > 1.0 + 1e-12)
            throw consistency_error("build_eta: profile escapes [0,1]");
    if (eta.unit_profile()(0.0) != 1.0) throw consistency_error("build_eta: eta(0) != 1");
    // sampled transform of the tabulated profile itself (independent of the
    // manifestly nonnegative psi^2 table)
    for (int i = 1; i <= 40; ++i) {
        const double k = 6.0 * double(i);
        const double direct = detail::radial_sin_transform(eta.unit_profile(), k);
        if (direct < -1e-8) throw consistency_error("build_eta: sampled transform negative");
    }
    return eta;
}

} // namespace qjellium
