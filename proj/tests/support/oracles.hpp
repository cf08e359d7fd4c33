#pragma once

// Independent reference computations used only by the test suite.  Everything
// here deliberately avoids the library's quadrature paths: series expansions,
// closed forms, and Monte Carlo estimates that the implementation must match.

#include <cmath>
#include <cstddef>

#include "qjellium/statistics.hpp"

namespace oracles {

// Maxwell-Boltzmann / polylog series for the ideal-gas density,
//   rho = n (4 pi beta)^{-3/2} sum_{l>=1} (-+1)^{l+1} z^l l^{-3/2},
// valid for z < 1 (both statistics).  Converges geometrically; the remainder
// after L terms is below z^{L+1}/(1-z).
inline double density_series(double beta, double z, double n, qjellium::Statistics stats,
                             double tol = 1e-16) {
    if (!(z > 0.0) || !(z < 1.0)) throw std::invalid_argument("density_series needs 0<z<1");
    double sum = 0.0, zl = 1.0;
    for (std::size_t l = 1; l < 100000; ++l) {
        zl *= z;
        double term = zl / (double(l) * std::sqrt(double(l)));
        if (stats == qjellium::Statistics::fermi && l % 2 == 0) term = -term;
        sum += term;
        if (zl / (1.0 - z) < tol * std::max(sum, 1e-300) && l > 4) break;
    }
    return n * std::pow(4.0 * M_PI * beta, -1.5) * sum;
}

// Same series written without cleverness, as a cross-check of the helper above.
inline double density_series_plain(double beta, double z, double n, qjellium::Statistics stats,
                                   std::size_t terms = 4000) {
    double sum = 0.0;
    for (std::size_t l = 1; l <= terms; ++l) {
        const double term = std::pow(z, double(l)) * std::pow(double(l), -1.5);
        if (stats == qjellium::Statistics::fermi)
            sum += (l % 2 == 1 ? term : -term);
        else
            sum += term;
    }
    return n * std::pow(4.0 * M_PI * beta, -1.5) * sum;
}

// Gaussian series for the Bose position-space profile:
//   gamma~(s) = sum_{l>=1} z^l (4 pi beta l)^{-3/2} exp(-s^2/(4 beta l))
inline double gamma_tilde_series_bose(double beta, double z, double s, double tol = 1e-18) {
    if (!(z > 0.0) || !(z < 1.0)) throw std::invalid_argument("series needs 0<z<1");
    double sum = 0.0, zl = 1.0;
    for (std::size_t l = 1; l < 2000000; ++l) {
        zl *= z;
        const double bl = 4.0 * M_PI * beta * double(l);
        const double term = zl * std::pow(bl, -1.5) * std::exp(-s * s / (4.0 * beta * double(l)));
        sum += term;
        if (zl / (1.0 - z) * std::pow(bl, -1.5) < tol * std::max(std::abs(sum), 1e-300)) break;
    }
    return sum;
}

// Alternating version for Fermi (z < 1 only).
inline double gamma_tilde_series_fermi(double beta, double z, double s, double tol = 1e-18) {
    if (!(z > 0.0) || !(z < 1.0)) throw std::invalid_argument("series needs 0<z<1");
    double sum = 0.0, zl = 1.0;
    for (std::size_t l = 1; l < 2000000; ++l) {
        zl *= z;
        const double bl = 4.0 * M_PI * beta * double(l);
        const double term = zl * std::pow(bl, -1.5) * std::exp(-s * s / (4.0 * beta * double(l)));
        sum += (l % 2 == 1 ? term : -term);
        if (zl / (1.0 - z) * std::pow(bl, -1.5) < tol * std::max(std::abs(sum), 1e-300)) break;
    }
    return sum;
}

// zeta(3/2) partial sum with a rigorous bracket: integral bounds give
//   sum_{l<=N} + 2/sqrt(N+1) <= zeta(3/2) <= sum_{l<=N} + 2/sqrt(N)
struct ZetaBracket {
    double lower, upper;
};
inline ZetaBracket zeta_three_halves_bracket(std::size_t N = 200000) {
    double sum = 0.0;
    for (std::size_t l = N; l >= 1; --l) sum += std::pow(double(l), -1.5);
    return {sum + 2.0 / std::sqrt(double(N + 1)), sum + 2.0 / std::sqrt(double(N))};
}

// Classical (Maxwell-Boltzmann) free energy density.
inline double classical_free_energy(double beta, double rho, double n) {
    return rho / beta * (std::log(rho * std::pow(4.0 * M_PI * beta, 1.5) / n) - 1.0);
}

} // namespace oracles
