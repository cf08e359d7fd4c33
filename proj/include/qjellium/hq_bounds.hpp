#pragma once

// The effective one-particle Hamiltonian h_q(p) that compares the ideal-gas
// occupation at momenta p +- q with the occupation at p, together with the
// two-sided bounds on h_q - h_0 used by the localization argument, the D_z
// constants appearing in those bounds, and the closed-form second derivative
// of lambda -> h_{lambda q}(p) that proves them.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qjellium/errors.hpp"
#include "qjellium/numerics/quadrature.hpp"
#include "qjellium/numerics/stable.hpp"
#include "qjellium/statistics.hpp"

namespace qjellium {

// Evaluation point: momenta p and q, inverse temperature, fugacity.
struct HqPoint {
    Eigen::Vector3d p;
    Eigen::Vector3d q;
    double beta = 1.0;
    double z = 0.5;
    Statistics stats = Statistics::fermi;
};

namespace detail {

inline void validate_hq_point(const HqPoint& pt) {
    if (!(pt.beta > 0.0)) throw domain_error("h_q: need beta > 0");
    if (!(pt.z > 0.0)) throw domain_error("h_q: need z > 0");
    if (pt.stats == Statistics::bose && !(pt.z < 1.0))
        throw domain_error("h_q: Bose requires z < 1");
}

// ln gamma_0 and ln(1 -+ gamma_0) at squared momentum k2 (beta = 1 form;
// callers pass beta*k^2).  Stable at any magnitude of the exponent.
inline double log_occupation(double k2, double lnz, Statistics st) {
    const double a = k2 - lnz;
    if (st == Statistics::fermi) return -num::softplus(a); // ln 1/(e^a+1)
    return -a - num::log1mexp(a);                          // ln 1/(e^a-1), a > 0
}
inline double log_one_mp_occupation(double k2, double lnz) {
    // Fermi only: ln(1 - gamma) = ln 1/(1+e^{-a})
    return -num::softplus(-(k2 - lnz));
}

} // namespace detail

// h_q(p) = ln[(2 -+ gamma_0(p+q) -+ gamma_0(p-q)) / (gamma_0(p+q) + gamma_0(p-q))],
// evaluated through logarithm-stable forms so that huge beta p^2 never
// underflows.  At q = 0 this is beta(p^2 - mu) = beta p^2 - ln z.
inline double h_q(const HqPoint& pt) {
    detail::validate_hq_point(pt);
    const double lnz = std::log(pt.z);
    const double a2p = pt.beta * (pt.p + pt.q).squaredNorm();
    const double a2m = pt.beta * (pt.p - pt.q).squaredNorm();
    const double lg_p = detail::log_occupation(a2p, lnz, pt.stats);
    const double lg_m = detail::log_occupation(a2m, lnz, pt.stats);
    const double log_den = num::logaddexp(lg_p, lg_m);
    double log_num;
    if (pt.stats == Statistics::fermi) {
        // 2 - g+ - g- = (1 - g+) + (1 - g-)
        log_num = num::logaddexp(detail::log_one_mp_occupation(a2p, lnz),
                                 detail::log_one_mp_occupation(a2m, lnz));
    } else {
        // 2 + g+ + g-
        log_num = num::logaddexp(std::log(2.0), log_den);
    }
    return log_num - log_den;
}

// Reference-only direct evaluation of the same ratio; underflows at large
// beta p^2 and exists to cross-check the stable form where it is valid.
inline double h_q_naive(const HqPoint& pt) {
    detail::validate_hq_point(pt);
    const double s = quantum_sign(pt.stats);
    auto occ = [&](const Eigen::Vector3d& k) {
        return 1.0 / (std::exp(pt.beta * k.squaredNorm()) / pt.z - s);
    };
    const double gp = occ(pt.p + pt.q), gm = occ(pt.p - pt.q);
    return std::log((2.0 + s * (gp + gm)) / (gp + gm));
}

inline double h_0(const HqPoint& pt) {
    HqPoint at0 = pt;
    at0.q.setZero();
    return h_q(at0);
}

// D_z = sup_{u>0} z u / (e^u + z)            (Fermi)
//     = sup_{u>0} z^2 u e^u / (e^u - z)^2    (Bose)
// found by a doubling coarse scan followed by golden-section refinement.
inline double d_z_constant(double z, Statistics stats) {
    if (!(z > 0.0)) throw domain_error("d_z_constant: need z > 0");
    if (stats == Statistics::bose && !(z < 1.0))
        throw domain_error("d_z_constant: Bose requires z < 1");
    auto objective = [&](double u) {
        if (stats == Statistics::fermi) return z * u / (std::exp(u) + z);
        const double d = std::exp(u) - z;
        return z * z * u * std::exp(u) / (d * d);
    };
    // coarse scan on a log grid, extending until the tail has decayed
    double hi = 32.0;
    double best_u = 1.0, best = 0.0;
    for (;;) {
        const double lo = 1e-8;
        const int n = 4000;
        best = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double u = lo * std::pow(hi / lo, static_cast<double>(i) / n);
            const double g = objective(u);
            if (g > best) {
                best = g;
                best_u = u;
            }
        }
        if (objective(hi) < 1e-6 * best || hi > 600.0) break;
        hi *= 2.0;
    }
    // golden-section refinement around the best grid point
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = best_u / 1.1, b = best_u * 1.1;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 200 && b - a > 1e-14 * best_u; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = objective(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = objective(x1);
        }
    }
    return std::max(best, std::max(f1, f2));
}

// Closed-form second derivative of f(lambda) = h_{lambda q}(p), split into
// its three groups; `last_line` is the final positive group, which stays
// within [0, 4 beta q^2].  The formula is the beta = 1 expression evaluated
// at sqrt(beta)-scaled momenta, which is exactly how beta re-enters.
struct FSecondTerms {
    double total = 0.0;
    double last_line = 0.0;
};

inline FSecondTerms f_second_terms(const HqPoint& pt, double lambda) {
    detail::validate_hq_point(pt);
    const double s = quantum_sign(pt.stats);
    const double lnz = std::log(pt.z);
    const double rb = std::sqrt(pt.beta);
    const Eigen::Vector3d p = rb * pt.p, q = rb * pt.q;
    const Eigen::Vector3d pp = p + lambda * q, pm = p - lambda * q;
    auto occ = [&](double k2) {
        const double a = k2 - lnz;
        return pt.stats == Statistics::fermi ? 1.0 / (std::exp(a) + 1.0)
                                             : 1.0 / std::expm1(a);
    };
    const double gp = occ(pp.squaredNorm()), gm = occ(pm.squaredNorm());
    const double sum = gp + gm;
    if (!(sum > 0.0))
        throw numeric_error("f_second_terms: occupations underflowed to zero", sum);
    const double up = 1.0 + s * gp, um = 1.0 + s * gm; // 1 -+ gamma
    const double t = 2.0 + s * sum;                    // 2 -+ g+ -+ g-
    const double dp = pp.dot(q), dm = pm.dot(q);
    const double q2 = q.squaredNorm();

    const double line1 =
        (-s) * 4.0 / sum *
        (dp * dp * gp * gp * up + dm * dm * gm * gm * um +
         s * gp * gm / sum * (dp * up + dm * um) * (dp * up + dm * um));
    const double line2 =
        s * 4.0 / t *
        (dp * dp * gp * up * up + dm * dm * gm * um * um +
         s * up * um / t * (dp * gp + dm * gm) * (dp * gp + dm * gm));
    const double line3 =
        ((-s) / t + 1.0 / sum) * 2.0 * q2 * (gp * up + gm * um);
    return FSecondTerms{line1 + line2 + line3, line3};
}

inline double f_second_derivative(const HqPoint& pt, double lambda) {
    return f_second_terms(pt, lambda).total;
}

// Residual of the Taylor identity
//   h_q(p) - h_0(p) = int_0^1 (1 - lambda) f''(lambda) dlambda,
// with the left side from the stable h_q and the right side by adaptive
// quadrature of the closed form.  Returned relative to 1 + |lhs|; the
// contract is <= 1e-8.
inline double taylor_identity_check(const HqPoint& pt) {
    const double lhs = h_q(pt) - h_0(pt);
    const double rhs = num::integrate(
        [&](double lam) { return (1.0 - lam) * f_second_derivative(pt, lam); }, 0.0, 1.0,
        1e-12, 400);
    return std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
}

// Sweep machinery: a geometric grid in |p|, |q| (in thermal units
// beta^{-1/2}), a short list of relative angles, and per-lemma fugacity and
// temperature lists.  Reports count inequality violations beyond a -1e-9
// margin slack.
struct SweepGrid {
    int p_points = 10;
    int q_points = 10;
    std::vector<double> cosines{-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<double> betas{0.5, 1.0, 2.0};
    std::vector<double> fugacities; // defaults chosen per statistics
    double span_lo = 1e-2; // |p|, |q| range in units of beta^{-1/2}
    double span_hi = 10.0;
};

struct SweepReport {
    long total = 0;
    long violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<std::string> violating_points;
};

namespace detail {

template <class CheckFn>
SweepReport run_hq_sweep(const SweepGrid& grid, Statistics stats,
                         const std::vector<double>& default_z, CheckFn&& check) {
    SweepGrid g = grid;
    if (g.fugacities.empty()) g.fugacities = default_z;
    if (g.p_points < 2 || g.q_points < 2)
        throw domain_error("hq sweep: need at least two grid points per axis");
    SweepReport rep;
    for (double z : g.fugacities) {
        const double dz = d_z_constant(z, stats);
        for (double beta : g.betas) {
            const double unit = 1.0 / std::sqrt(beta);
            for (int ip = 0; ip < g.p_points; ++ip) {
                const double pn = unit * g.span_lo *
                                  std::pow(g.span_hi / g.span_lo,
                                           static_cast<double>(ip) / (g.p_points - 1));
                for (int iq = 0; iq < g.q_points; ++iq) {
                    const double qn = unit * g.span_lo *
                                      std::pow(g.span_hi / g.span_lo,
                                               static_cast<double>(iq) / (g.q_points - 1));
                    for (double c : g.cosines) {
                        HqPoint pt;
                        pt.p = Eigen::Vector3d(pn, 0.0, 0.0);
                        pt.q = Eigen::Vector3d(qn * c, qn * std::sqrt(std::max(0.0, 1.0 - c * c)),
                                               0.0);
                        pt.beta = beta;
                        pt.z = z;
                        pt.stats = stats;
                        const double delta = h_q(pt) - h_0(pt);
                        ++rep.total;
                        check(pt, delta, dz, rep);
                    }
                }
            }
        }
    }
    return rep;
}

inline void record_margin(const HqPoint& pt, const char* which, double margin,
                          SweepReport& rep) {
    rep.min_margin = std::min(rep.min_margin, margin);
    if (margin < -1e-9) {
        ++rep.violations;
        rep.violating_points.push_back(
            std::string(which) + " margin=" + std::to_string(margin) +
            " |p|=" + std::to_string(pt.p.norm()) + " |q|=" + std::to_string(pt.q.norm()) +
            " cos=" +
            std::to_string(pt.p.norm() > 0.0 && pt.q.norm() > 0.0
                               ? pt.p.dot(pt.q) / (pt.p.norm() * pt.q.norm())
                               : 1.0) +
            " beta=" + std::to_string(pt.beta) + " z=" + std::to_string(pt.z));
    }
}

} // namespace detail

// Fermi bounds: both two-sided estimates on h_q - h_0,
//   -2 beta q^2 (3 D_z + 2 beta p^2) <= delta <= 2 beta q^2 (1 + 2 D_z)
//   beta(q^2 - 2|p.q|)               <= delta <= beta(q^2 + 2|p.q|).
inline SweepReport sweep_lemma1(const SweepGrid& grid = {}) {
    return detail::run_hq_sweep(
        grid, Statistics::fermi, {0.3, 1.0, 3.0},
        [](const HqPoint& pt, double delta, double dz, SweepReport& rep) {
            const double bq2 = pt.beta * pt.q.squaredNorm();
            const double bp2 = pt.beta * pt.p.squaredNorm();
            const double pq = std::abs(pt.p.dot(pt.q));
            detail::record_margin(pt, "dz-lower",
                                  delta + 2.0 * bq2 * (3.0 * dz + 2.0 * bp2), rep);
            detail::record_margin(pt, "dz-upper", 2.0 * bq2 * (1.0 + 2.0 * dz) - delta,
                                  rep);
            detail::record_margin(
                pt, "pq-lower", delta - pt.beta * (pt.q.squaredNorm() - 2.0 * pq), rep);
            detail::record_margin(
                pt, "pq-upper", pt.beta * (pt.q.squaredNorm() + 2.0 * pq) - delta, rep);
        });
}

// Bose bounds:
//   -2 beta q^2 (3 D_z + 2 beta p^2) <= delta <= beta q^2
//   delta >= beta(q^2 - 2|p.q|).
inline SweepReport sweep_lemma2(const SweepGrid& grid = {}) {
    return detail::run_hq_sweep(
        grid, Statistics::bose, {0.3, 0.7, 0.95},
        [](const HqPoint& pt, double delta, double dz, SweepReport& rep) {
            const double bq2 = pt.beta * pt.q.squaredNorm();
            const double bp2 = pt.beta * pt.p.squaredNorm();
            const double pq = std::abs(pt.p.dot(pt.q));
            detail::record_margin(pt, "dz-lower",
                                  delta + 2.0 * bq2 * (3.0 * dz + 2.0 * bp2), rep);
            detail::record_margin(pt, "q2-upper", bq2 - delta, rep);
            detail::record_margin(
                pt, "pq-lower", delta - pt.beta * (pt.q.squaredNorm() - 2.0 * pq), rep);
        });
}

} // namespace qjellium
