#pragma once

// Ideal Fermi/Bose gas thermodynamics in 3D, units hbar = 1, 2m = 1 (dispersion
// eps(p) = p^2).  All densities are number densities; `n` counts internal states
// per momentum mode (spin degeneracy).

#include <cmath>
#include <limits>

#include "qjellium/errors.hpp"
#include "qjellium/numerics/quadrature.hpp"
#include "qjellium/numerics/roots.hpp"
#include "qjellium/numerics/stable.hpp"
#include "qjellium/statistics.hpp"

namespace qjellium {

struct ThermoState {
    Statistics stats = Statistics::fermi;
    double beta = 1.0; // inverse temperature
    double rho = 0.0;  // number density
    double n = 1.0;    // internal degeneracy
    double z = 0.0;    // fugacity
    double mu = 0.0;   // chemical potential; z = exp(beta*mu)
};

namespace detail {

// occupation without the Bose z<1 domain check; the z=1 boundary is legal for
// p > 0 and is used by the density integrand
inline double occupation_unchecked(double p, double beta, double z, Statistics stats) {
    const double a = beta * p * p - std::log(z); // z^{-1} e^{beta p^2} = e^a
    if (stats == Statistics::fermi) {
        if (a > 0.0) {
            const double e = std::exp(-a);
            return e / (1.0 + e);
        }
        return 1.0 / (1.0 + std::exp(a));
    }
    return 1.0 / std::expm1(a);
}

} // namespace detail

// gamma_0(p) = 1 / (z^{-1} e^{beta p^2} +- 1), + for Fermi, - for Bose
inline double momentum_occupation(double p, double beta, double z, Statistics stats) {
    if (!(beta > 0.0) || !(z > 0.0)) throw domain_error("momentum_occupation: need beta>0, z>0");
    if (stats == Statistics::bose && z >= 1.0)
        throw domain_error("momentum_occupation: Bose fugacity must satisfy z < 1");
    return detail::occupation_unchecked(p, beta, z, stats);
}

// Radial cutoff beyond which the occupation is below ~e^{-45} of its scale; all
// momentum integrals run on [0, P].  Written in terms of (beta, ln z) only, so
// the cutoff maps exactly under the beta-scaling of the state.
inline double momentum_cutoff(double beta, double z) {
    const double lnz = std::log(z);
    return std::sqrt(std::max(45.0 + lnz, 15.0) / beta);
}

// zeta(3/2) by direct summation plus midpoint tail (no special-function library)
inline double zeta_three_halves() {
    static const double value = [] {
        const int N = 2000000;
        double sum = 0.0;
        for (int l = N; l >= 1; --l) sum += 1.0 / (double(l) * std::sqrt(double(l)));
        return sum + 2.0 / std::sqrt(double(N) + 0.5);
    }();
    return value;
}

// Bose condensation threshold: rho_c = n (4 pi beta)^{-3/2} zeta(3/2)
inline double critical_density(double beta, double n) {
    if (!(beta > 0.0) || !(n > 0.0)) throw domain_error("critical_density: need beta>0, n>0");
    return n * std::pow(4.0 * M_PI * beta, -1.5) * zeta_three_halves();
}

// rho(beta, z) = n/(2 pi^2) \int_0^P p^2 gamma_0(p) dp.  Bose accepts the closed
// boundary z = 1 (the integrand stays bounded; the value is rho_c).
inline double density_from_fugacity(double beta, double z, double n, Statistics stats) {
    if (!(beta > 0.0) || !(z > 0.0) || !(n > 0.0))
        throw domain_error("density_from_fugacity: need beta>0, z>0, n>0");
    if (stats == Statistics::bose && z > 1.0)
        throw domain_error("density_from_fugacity: Bose fugacity must satisfy z <= 1");
    const double P = momentum_cutoff(beta, z);
    auto integrand = [=](double p) {
        if (p <= 0.0) return 0.0;
        const double a = beta * p * p - std::log(z);
        if (stats == Statistics::bose && a < 1e-10)
            return p * p / (a * (1.0 + 0.5 * a)); // 1/expm1 series at the z->1 boundary
        return p * p * detail::occupation_unchecked(p, beta, z, stats);
    };
    return n / (2.0 * M_PI * M_PI) * num::integrate(integrand, 0.0, P, 1e-13);
}

// Fugacity from density: bracketed solve in u = ln z (monotone).  Bose input at
// or above rho_c has no normal-phase solution -> condensation_error.
inline double solve_fugacity(double beta, double rho, double n, Statistics stats) {
    if (!(beta > 0.0) || !(rho > 0.0) || !(n > 0.0))
        throw domain_error("solve_fugacity: need beta>0, rho>0, n>0");
    if (stats == Statistics::bose) {
        const double rc = critical_density(beta, n);
        if (rho >= rc)
            throw condensation_error("solve_fugacity: Bose density at/above condensation "
                                     "threshold rho_c = " + std::to_string(rc), rc);
    }
    auto g = [=](double u) { return density_from_fugacity(beta, std::exp(u), n, stats) - rho; };
    // Maxwell-Boltzmann estimate as the bracket seed
    double u0 = std::log(rho * std::pow(4.0 * M_PI * beta, 1.5) / n);
    double lo = u0, hi = u0;
    if (stats == Statistics::bose) { // keep the whole bracket in ln z < 0
        lo = std::min(lo, -1.0);
        hi = std::min(hi, -1e-14);
    }
    double glo = g(lo), ghi = (hi == lo) ? glo : g(hi);
    for (int it = 0; it < 200 && glo > 0.0; ++it) { // density(lo) too big -> move down
        lo -= std::max(1.0, std::abs(lo));
        glo = g(lo);
    }
    for (int it = 0; it < 200 && ghi < 0.0; ++it) { // density(hi) too small -> move up
        hi = (stats == Statistics::bose) ? 0.5 * hi : hi + std::max(1.0, std::abs(hi));
        if (stats == Statistics::bose && hi > -1e-306) break;
        ghi = g(hi);
    }
    if (glo > 0.0 || ghi < 0.0)
        throw numeric_error("solve_fugacity: failed to bracket", std::max(glo, -ghi) / rho);
    const double u = num::solve_bracketed(g, lo, hi, 1e-15);
    return std::exp(u);
}

inline ThermoState make_state(double beta, double rho, double n, Statistics stats) {
    ThermoState st;
    st.stats = stats;
    st.beta = beta;
    st.rho = rho;
    st.n = n;
    st.z = solve_fugacity(beta, rho, n, stats);
    st.mu = std::log(st.z) / beta;
    return st;
}

inline ThermoState state_from_fugacity(double beta, double z, double n, Statistics stats) {
    ThermoState st;
    st.stats = stats;
    st.beta = beta;
    st.n = n;
    st.z = z;
    st.mu = std::log(z) / beta;
    st.rho = density_from_fugacity(beta, z, n, stats);
    return st;
}

// The grand-canonical objective whose supremum over mu (at fixed rho) is the
// ideal free energy density:
//   Fermi: mu rho - n/(2 pi^2 beta) \int p^2 ln(1 + e^{beta(mu - p^2)}) dp
//   Bose:  mu rho + n/(2 pi^2 beta) \int p^2 ln(1 - e^{beta(mu - p^2)}) dp
inline double grand_objective(double beta, double rho, double n, Statistics stats, double mu) {
    if (!(beta > 0.0) || !(n > 0.0)) throw domain_error("grand_objective: need beta>0, n>0");
    if (stats == Statistics::bose && mu >= 0.0)
        throw domain_error("grand_objective: Bose needs mu < 0");
    const double z = std::exp(beta * mu);
    const double P = momentum_cutoff(beta, z);
    auto integrand = [=](double p) {
        const double w = beta * (mu - p * p);
        if (stats == Statistics::fermi) return p * p * num::softplus(w);
        if (p <= 0.0) return 0.0;
        return p * p * num::log1mexp(-w);
    };
    const double pressure_term = num::integrate(integrand, 0.0, P, 1e-13) /
                                 (2.0 * M_PI * M_PI * beta) * n;
    return stats == Statistics::fermi ? mu * rho - pressure_term : mu * rho + pressure_term;
}

// Ideal-gas free energy density evaluated at the state's own chemical potential
// (which is where the sup over mu is attained).
inline double ideal_free_energy(const ThermoState& st) {
    return grand_objective(st.beta, st.rho, st.n, st.stats, st.mu);
}

} // namespace qjellium
