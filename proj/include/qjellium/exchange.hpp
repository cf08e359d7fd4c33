#pragma once

// Exchange correction for the two-term free-energy expansion.  The key object is
// the position-space one-body profile
//   gamma~(s) = (2 pi)^{-3} \int gamma_0(p) e^{i p x} d^3p
//             = (2 pi^2 s)^{-1} \int_0^inf p sin(p s) gamma_0(p) dp,
// tabulated out to where its exponential envelope makes the exchange integral
// tail negligible, then
//   I = \int |gamma~(x)|^2 / |x| d^3x = 4 pi \int_0^inf s gamma~(s)^2 ds.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "qjellium/errors.hpp"
#include "qjellium/ideal_gas.hpp"
#include "qjellium/numerics/quadrature.hpp"
#include "qjellium/radial_profile.hpp"

namespace qjellium {

// Exponential decay rate of gamma~: distance of the nearest complex pole of
// gamma_0 from the real momentum axis.
inline double gamma_tilde_decay_rate(const ThermoState& st) {
    const double lnz = std::log(st.z);
    if (st.stats == Statistics::bose) return std::sqrt(-lnz / st.beta);
    return std::sqrt(std::complex<double>(lnz, M_PI)).imag() / std::sqrt(st.beta);
}

// Single-point evaluation by oscillatory quadrature (split at period multiples).
inline double gamma_tilde(const ThermoState& st, double s) {
    const double P = momentum_cutoff(st.beta, st.z);
    if (s < 0.0) throw domain_error("gamma_tilde: negative separation");
    if (s == 0.0) {
        auto integrand = [&](double p) {
            return p * p * detail::occupation_unchecked(p, st.beta, st.z, st.stats);
        };
        return num::integrate(integrand, 0.0, P, 1e-13) / (2.0 * M_PI * M_PI);
    }
    auto g = [&](double p) { return p * detail::occupation_unchecked(p, st.beta, st.z, st.stats); };
    const double osc = num::integrate_oscillatory_sin(g, s, P);
    return osc / (2.0 * M_PI * M_PI * s);
}

// Tabulated profile with spline interpolation; zero beyond the truncation radius.
class GammaTilde {
public:
    explicit GammaTilde(const ThermoState& st, std::size_t points = 2048) : state_(st) {
        kappa_ = gamma_tilde_decay_rate(st);
        const double sqrt_beta = std::sqrt(st.beta);
        trunc_ = std::max(32.0 / kappa_, 12.0 * sqrt_beta);
        const double s_min = 1e-3 * sqrt_beta;
        auto grid = RadialProfile::geometric_grid(s_min, trunc_, points, /*prepend_zero=*/true);
        profile_ = RadialProfile::tabulate([&](double s) { return gamma_tilde(st, s); }, grid);
    }

    double operator()(double s) const { return profile_(s); }
    double at_zero() const { return profile_.values().front(); } // = rho / n
    double truncation_radius() const { return trunc_; }
    double decay_rate() const { return kappa_; }
    const RadialProfile& profile() const { return profile_; }
    const ThermoState& state() const { return state_; }

    // Bound on the discarded 4 pi \int_S^inf s gamma~^2 ds via the measured
    // exponential envelope A e^{-kappa s} over the outer decade of the grid.
    double tail_bound() const {
        const auto& g = profile_.grid();
        const auto& v = profile_.values();
        double log_a = -std::numeric_limits<double>::infinity();
        for (std::size_t i = g.size() - g.size() / 10; i < g.size(); ++i) {
            if (v[i] != 0.0)
                log_a = std::max(log_a, std::log(std::abs(v[i])) + kappa_ * g[i]);
        }
        if (log_a == -std::numeric_limits<double>::infinity()) return 0.0;
        const double s = trunc_;
        const double geom = s / (2.0 * kappa_) + 1.0 / (4.0 * kappa_ * kappa_);
        return 4.0 * M_PI * std::exp(2.0 * (log_a - kappa_ * s)) * geom;
    }

private:
    ThermoState state_;
    RadialProfile profile_;
    double kappa_ = 0.0;
    double trunc_ = 0.0;
};

// I = 4 pi \int s gamma~(s)^2 ds over the tabulated support.  Each spline cell
// holds a degree-7 polynomial, which the 15-point panel rule integrates exactly.
inline double exchange_integral_real_space(const GammaTilde& gt) {
    const auto& grid = gt.profile().grid();
    double sum = 0.0, comp = 0.0;
    auto f = [&](double s) {
        const double v = gt(s);
        return s * v * v;
    };
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double piece = num::integrate_gk(f, grid[i], grid[i + 1], 1e-14, 8).value;
        const double y = piece - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return 4.0 * M_PI * sum;
}

// Independent momentum-space route:
//   I = (2 pi^3)^{-1} \int\int p p' gamma_0(p) gamma_0(p') ln((p+p')/|p-p'|) dp dp'
inline double exchange_integral_momentum(const ThermoState& st) {
    const double P = momentum_cutoff(st.beta, st.z);
    auto occ = [&](double p) { return detail::occupation_unchecked(p, st.beta, st.z, st.stats); };
    auto outer = [&](double p) {
        if (p <= 0.0) return 0.0;
        auto inner = [&](double q) {
            if (q <= 0.0) return 0.0;
            const double log_kernel = std::log((p + q) / std::abs(p - q));
            return q * occ(q) * log_kernel;
        };
        // split exactly at the integrable log singularity q = p
        double in = num::integrate(inner, 0.0, std::min(p, P), 1e-11, 600);
        if (p < P) in += num::integrate(inner, p, P, 1e-11, 600);
        return p * occ(p) * in;
    };
    return num::integrate(outer, 0.0, P, 1e-9, 800) / (2.0 * M_PI * M_PI * M_PI);
}

// Real-space value, cross-checked against the momentum-space route; a mismatch
// beyond 1e-4 means one of the quadratures is misconfigured.
inline double exchange_integral(const GammaTilde& gt) {
    const double real_space = exchange_integral_real_space(gt);
    const double momentum = exchange_integral_momentum(gt.state());
    const double scale = std::max({std::abs(real_space), std::abs(momentum), 1e-300});
    if (std::abs(real_space - momentum) > 1e-4 * scale)
        throw consistency_error("exchange_integral: real-space and momentum routes disagree");
    return real_space;
}

inline double exchange_integral(const ThermoState& st) { return exchange_integral(GammaTilde(st)); }

struct TwoTermFreeEnergy {
    ThermoState state;
    double f0 = 0.0;             // ideal-gas free energy density
    double exchange_integral = 0.0;
    double exchange_term = 0.0;  // -+ (alpha n / 2) I  (- Fermi, + Bose)
    double total = 0.0;
};

// f(beta, rho, alpha) ~ f_0(beta, rho) -+ (alpha n / 2) I(beta, rho) through the
// exchange order; alpha is the coupling strength.
inline TwoTermFreeEnergy two_term_free_energy(double beta, double rho, double alpha, double n,
                                              Statistics stats) {
    if (!(alpha >= 0.0)) throw domain_error("two_term_free_energy: need alpha >= 0");
    TwoTermFreeEnergy out;
    out.state = make_state(beta, rho, n, stats);
    out.f0 = ideal_free_energy(out.state);
    out.exchange_integral = exchange_integral(out.state);
    out.exchange_term = quantum_sign(stats) * 0.5 * alpha * n * out.exchange_integral;
    out.total = out.f0 + out.exchange_term;
    return out;
}

} // namespace qjellium
