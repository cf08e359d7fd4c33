// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qjellium/coulomb_split.hpp"
#include "qjellium/eta.hpp"
#include "qjellium/exchange.hpp"
#include "qjellium/fock.hpp"
#include "qjellium/hq_bounds.hpp"
#include "qjellium/ideal_gas.hpp"
#include "qjellium/numerics/quadrature.hpp"
#include "qjellium/numerics/rng.hpp"
#include "qjellium/quasifree.hpp"

using namespace qjellium;

namespace {

int failures = 0;

void criterion(int id, const char* name, const std::function<bool(std::string&)>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = fn(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %-34s %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, name, detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

Eigen::MatrixXcd random_hermitian(int m, double scale, num::Rng& rng) {
    Eigen::MatrixXcd a(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = std::complex<double>(rng.normal(), rng.normal());
    return 0.5 * scale * (a + a.adjoint());
}

Eigen::MatrixXcd random_positive(int m, double scale, double floor, num::Rng& rng) {
    Eigen::MatrixXcd h = random_hermitian(m, scale, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    return h + (floor - es.eigenvalues().minCoeff()) * Eigen::MatrixXcd::Identity(m, m);
}

Eigen::MatrixXcd gamma_of(const Eigen::MatrixXcd& h, Statistics stats) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXd occ(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double e = es.eigenvalues()(i);
        occ(i) = stats == Statistics::fermi ? 1.0 / (std::exp(e) + 1.0) : 1.0 / std::expm1(e);
    }
    return es.eigenvectors() * occ.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<int> random_subset(int m, num::Rng& rng) {
    std::vector<int> subset;
    for (int i = 0; i < m; ++i)
        if (rng.uniform() < 0.5) subset.push_back(i);
    if (subset.empty()) subset.push_back(rng.uniform_int(0, m - 1));
    return subset;
}

HqPoint random_hq_point(num::Rng& rng, Statistics stats, double z, double beta) {
    HqPoint pt;
    pt.p = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    pt.q = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    pt.beta = beta;
    pt.z = z;
    pt.stats = stats;
    return pt;
}

// ---------------------------------------------------------------------------

bool c1_exchange_routes(std::string& detail) {
    double worst = 0.0;
    for (auto stats : {Statistics::fermi, Statistics::bose}) {
        const std::vector<double> zs = stats == Statistics::fermi
                                           ? std::vector<double>{0.3, 1.0, 3.0}
                                           : std::vector<double>{0.3, 0.7, 0.95};
        for (double z : zs)
            for (double beta : {0.5, 1.0, 2.0}) {
                const ThermoState st = state_from_fugacity(beta, z, 1.0, stats);
                const double real_space = exchange_integral_real_space(GammaTilde(st));
                const double momentum = exchange_integral_momentum(st);
                worst = std::max(worst,
                                 std::abs(real_space - momentum) / std::abs(real_space));
            }
    }
    detail = "18 (z,beta) states, worst route gap " + num(worst) + " <= 1e-6";
    return worst <= 1e-6;
}

bool c2_coulomb_decomposition(std::string& detail) {
    double worst_recon = 0.0;
    for (double s : {0.1, 1.0, 10.0}) {
        const double upper = 50.0 * s;
        const double integral =
            num::integrate([&](double r) { return ball_overlap(r, s) / std::pow(r, 5); },
                           0.5 * s, upper, 1e-12, 400) /
                M_PI +
            v_long(s, upper);
        worst_recon = std::max(worst_recon, std::abs(integral * s - 1.0));
    }

    num::Rng rng(11);
    double worst_split = 0.0;
    for (int t = 0; t < 20; ++t) {
        const double s = std::exp(rng.uniform(std::log(1e-2), std::log(1e2)));
        const double radius = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
        worst_split =
            std::max(worst_split, std::abs((v_short(s, radius) + v_long(s, radius)) * s - 1.0));
    }

    bool exact = true;
    for (double radius : {0.1, 0.5, 1.0, 2.5, 10.0}) {
        exact = exact && v_long(0.0, radius) == 4.0 / (3.0 * radius);
        exact = exact && v_short(2.0 * radius, radius) == 0.0;
        exact = exact && v_short(3.0 * radius, radius) == 0.0;
    }

    detail = "reconstruction " + num(worst_recon) + " <= 1e-8, split " + num(worst_split) +
             " <= 1e-10, contact/support exact " + (exact ? "yes" : "NO");
    return worst_recon <= 1e-8 && worst_split <= 1e-10 && exact;
}

bool c3_lemma_sweeps(std::string& detail) {
    const SweepReport fermi = sweep_lemma1();
    const SweepReport bose = sweep_lemma2();
    detail = "fermi " + std::to_string(fermi.total) + " pts margin " + num(fermi.min_margin) +
             ", bose " + std::to_string(bose.total) + " pts margin " + num(bose.min_margin) +
             ", violations " + std::to_string(fermi.violations + bose.violations);
    return fermi.total >= 4500 && bose.total >= 4500 && fermi.violations == 0 &&
           bose.violations == 0;
}

bool c4_appendix_identities(std::string& detail) {
    num::Rng rng(13);
    double worst_fd = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        const double z = stats == Statistics::bose ? 0.9 - 0.2 * (t % 4) : 0.4 + 0.7 * (t % 3);
        const HqPoint pt = random_hq_point(rng, stats, z, 0.6 + 0.2 * (t % 5));
        const double lam = 0.05 + 0.045 * t, step = 1e-4;
        auto f_at = [&](double l) {
            HqPoint s = pt;
            s.q = l * pt.q;
            return h_q(s);
        };
        const double fd = (f_at(lam + step) - 2.0 * f_at(lam) + f_at(lam - step)) / (step * step);
        const double cf = f_second_derivative(pt, lam);
        worst_fd = std::max(worst_fd, std::abs(fd - cf) / (1.0 + std::abs(cf)));
    }

    double worst_taylor = 0.0;
    for (int t = 0; t < 40; ++t) {
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        const double z = stats == Statistics::bose ? 0.95 - 0.15 * (t % 5) : 0.3 + 0.9 * (t % 3);
        const HqPoint pt = random_hq_point(rng, stats, z, 0.5 + 0.25 * (t % 7));
        worst_taylor = std::max(worst_taylor, taylor_identity_check(pt));
    }

    // f'(0) = 0: the centered difference collapses to rounding noise, and the
    // forward increment is quadratic in the step
    double worst_fprime = 0.0, worst_quad = 0.0;
    for (int t = 0; t < 10; ++t) {
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        const HqPoint pt =
            random_hq_point(rng, stats, stats == Statistics::bose ? 0.8 : 1.2, 1.0);
        auto f_at = [&](double l) {
            HqPoint s = pt;
            s.q = l * pt.q;
            return h_q(s);
        };
        const double step = 1e-4;
        worst_fprime = std::max(worst_fprime, std::abs(f_at(step) - f_at(-step)) / (2.0 * step) /
                                                  (1.0 + std::abs(f_at(0.0))));
        const double h = 1e-3;
        const double inc1 = f_at(h) - f_at(0.0), inc2 = f_at(2.0 * h) - f_at(0.0);
        if (std::abs(inc1) > 1e-9)
            worst_quad = std::max(worst_quad, std::abs(inc2 / inc1 - 4.0));
    }

    detail = "f'' fd " + num(worst_fd) + " <= 1e-5, taylor " + num(worst_taylor) +
             " <= 1e-8, f'(0) " + num(worst_fprime) + ", step^2 ratio dev " + num(worst_quad);
    return worst_fd <= 1e-5 && worst_taylor <= 1e-8 && worst_fprime <= 1e-11 &&
           worst_quad <= 0.04;
}

bool c5_pair_oracle(std::string& detail) {
    num::Rng rng(2025);
    double worst = 0.0, worst_excess = -1.0;
    for (int t = 0; t < 100; ++t) { // Fermi, up to 8 modes
        const int m = 2 + t % 7;
        const Eigen::MatrixXcd h = random_hermitian(m, 0.8, rng);
        const FockSpace sp(Statistics::fermi, m);
        const FockState st = quasifree_gibbs(h, sp);
        const Eigen::MatrixXcd gamma = gamma_of(h, Statistics::fermi);
        const auto subset = random_subset(m, rng);
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(m, m);
        for (int i : subset) x(i, i) = 1.0;
        const double exact = pair_count_exact(st, subset);
        const double quasi = pair_count_quasifree(OnePdm(gamma, Statistics::fermi), x);
        worst = std::max(worst, std::abs(exact - quasi) / (1.0 + std::abs(exact)));
        const double tr = (x * gamma).real().trace();
        const double bound = tr * tr * (tr + 2.0) * (tr + 2.0);
        worst_excess = std::max(
            worst_excess, (fourth_moment_exact(st, subset) - bound) / (1.0 + bound));
    }
    const double fermi_worst = worst;

    const double floors[] = {0.9, 2.6, 4.0, 5.5};
    for (int t = 0; t < 50; ++t) { // Bose, up to 4 modes, adaptive cap
        const int m = 1 + t % 4;
        const Eigen::MatrixXcd h = random_positive(m, 0.6, floors[m - 1], rng);
        const FockSpace sp = adaptive_bose_space(h, 1e-13);
        const FockState st = quasifree_gibbs(h, sp);
        const Eigen::MatrixXcd gamma = gamma_of(h, Statistics::bose);
        const auto subset = random_subset(m, rng);
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(m, m);
        for (int i : subset) x(i, i) = 1.0;
        const double exact = pair_count_exact(st, subset);
        const double quasi = pair_count_quasifree(OnePdm(gamma, Statistics::bose), x);
        worst = std::max(worst, std::abs(exact - quasi) / (1.0 + std::abs(exact)));
        const double tr = (x * gamma).real().trace();
        const double bound = 24.0 * tr * tr * (tr + 0.5) * (tr + 0.5);
        worst_excess = std::max(
            worst_excess, (fourth_moment_exact(st, subset) - bound) / (1.0 + bound));
    }

    detail = "150 instances, fermi dev " + num(fermi_worst) + ", overall dev " + num(worst) +
             " <= 1e-9; fourth-moment excess " + num(worst_excess) + " <= 1e-9";
    return worst <= 1e-9 && worst_excess <= 1e-9;
}

bool c6_entropy_suite(std::string& detail) {
    num::Rng rng(7);
    double worst_agree = 0.0, worst_pinsker = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 50; ++t) { // exact vs quasi-free relative entropy
        const bool bose = t % 4 == 3;
        double exact = 0.0, quasi = 0.0, tnorm = 0.0;
        if (!bose) {
            const int m = 2 + t % 3;
            const Eigen::MatrixXcd h1 = random_hermitian(m, 0.7, rng);
            const Eigen::MatrixXcd h2 = random_hermitian(m, 0.7, rng);
            const FockSpace sp(Statistics::fermi, m);
            const FockState a = quasifree_gibbs(h1, sp), b = quasifree_gibbs(h2, sp);
            exact = rel_entropy_exact(a, b);
            quasi = rel_entropy_quasifree(
                OnePdm(gamma_of(h1, Statistics::fermi), Statistics::fermi),
                OnePdm(gamma_of(h2, Statistics::fermi), Statistics::fermi));
            tnorm = trace_norm_diff(a, b);
        } else {
            const int m = 1 + t % 3;
            const double floor = m == 1 ? 0.9 : (m == 2 ? 2.6 : 4.0);
            const Eigen::MatrixXcd h1 = random_positive(m, 0.5, floor, rng);
            const Eigen::MatrixXcd h2 = random_positive(m, 0.5, floor, rng);
            const FockSpace sp = adaptive_bose_space(h1, 1e-12);
            const FockState a = quasifree_gibbs(h1, sp), b = quasifree_gibbs(h2, sp);
            exact = rel_entropy_exact(a, b);
            quasi = rel_entropy_quasifree(
                OnePdm(gamma_of(h1, Statistics::bose), Statistics::bose),
                OnePdm(gamma_of(h2, Statistics::bose), Statistics::bose));
            tnorm = trace_norm_diff(a, b);
        }
        worst_agree = std::max(worst_agree, std::abs(exact - quasi) / (1.0 + exact));
        worst_pinsker = std::min(worst_pinsker, exact - 0.5 * tnorm * tnorm);
    }

    long mono_viol = 0;
    for (int t = 0; t < 50; ++t) { // monotone under restriction
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        const int m = 6;
        Eigen::MatrixXcd ha, hb;
        if (stats == Statistics::fermi) {
            ha = random_hermitian(m, 0.8, rng);
            hb = random_hermitian(m, 0.8, rng);
        } else {
            ha = random_positive(m, 0.5, 0.7, rng);
            hb = random_positive(m, 0.5, 0.7, rng);
        }
        const OnePdm omega(gamma_of(ha, stats), stats);
        const OnePdm gamma(gamma_of(hb, stats), stats);
        const int keep = rng.uniform_int(1, m - 1);
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(m, m);
        for (int i = 0; i < keep; ++i) x(i, i) = 1.0;
        const double full = rel_entropy_quasifree(omega, gamma);
        const double part = rel_entropy_quasifree(restrict_one_pdm(omega, x),
                                                  restrict_one_pdm(gamma, x));
        if (part > full + 1e-10 * (1.0 + full)) ++mono_viol;
    }

    long super_viol = 0;
    for (int t = 0; t < 20; ++t) { // superadditive over disjoint blocks
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        Eigen::MatrixXcd g1, g2;
        if (stats == Statistics::fermi) {
            g1 = gamma_of(random_hermitian(3, 0.8, rng), stats);
            g2 = gamma_of(random_hermitian(3, 0.8, rng), stats);
        } else {
            g1 = gamma_of(random_positive(3, 0.5, 0.7, rng), stats);
            g2 = gamma_of(random_positive(3, 0.5, 0.7, rng), stats);
        }
        Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Zero(6, 6);
        gamma.topLeftCorner(3, 3) = g1;
        gamma.bottomRightCorner(3, 3) = g2;
        const Eigen::MatrixXcd omega =
            stats == Statistics::fermi
                ? gamma_of(random_hermitian(6, 0.8, rng), stats)
                : gamma_of(random_positive(6, 0.5, 0.7, rng), stats);
        Eigen::MatrixXcd x1 = Eigen::MatrixXcd::Zero(6, 6), x2 = Eigen::MatrixXcd::Zero(6, 6);
        for (int i = 0; i < 3; ++i) {
            x1(i, i) = 1.0;
            x2(i + 3, i + 3) = 1.0;
        }
        const OnePdm om(omega, stats), ga(gamma, stats);
        const double whole = rel_entropy_quasifree(om, ga);
        const double parts = rel_entropy_quasifree(restrict_one_pdm(om, x1), OnePdm(g1, stats)) +
                             rel_entropy_quasifree(restrict_one_pdm(om, x2), OnePdm(g2, stats));
        if (parts > whole + 1e-10 * (1.0 + whole)) ++super_viol;
    }

    long convex_viol = 0;
    for (int t = 0; t < 50; ++t) { // midpoint convexity in the first argument
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        Eigen::MatrixXcd o1, o2, g;
        if (stats == Statistics::fermi) {
            o1 = gamma_of(random_hermitian(5, 0.8, rng), stats);
            o2 = gamma_of(random_hermitian(5, 0.8, rng), stats);
            g = gamma_of(random_hermitian(5, 0.8, rng), stats);
        } else {
            o1 = gamma_of(random_positive(5, 0.5, 0.7, rng), stats);
            o2 = gamma_of(random_positive(5, 0.5, 0.7, rng), stats);
            g = gamma_of(random_positive(5, 0.5, 0.7, rng), stats);
        }
        const double mid =
            rel_entropy_quasifree(OnePdm(0.5 * (o1 + o2), stats), OnePdm(g, stats));
        const double avg = 0.5 * rel_entropy_quasifree(OnePdm(o1, stats), OnePdm(g, stats)) +
                           0.5 * rel_entropy_quasifree(OnePdm(o2, stats), OnePdm(g, stats));
        if (mid > avg + 1e-10 * (1.0 + avg)) ++convex_viol;
    }

    detail = "agree " + num(worst_agree) + " <= 1e-9; pinsker slack " + num(worst_pinsker) +
             "; violations mono/super/convex " + std::to_string(mono_viol) + "/" +
             std::to_string(super_viol) + "/" + std::to_string(convex_viol);
    return worst_agree <= 1e-9 && worst_pinsker >= -1e-12 && mono_viol == 0 &&
           super_viol == 0 && convex_viol == 0;
}

bool c7_thermodynamic_consistency(std::string& detail) {
    double worst_fug = 0.0;
    const std::pair<double, double> fermi_pts[] = {{0.5, 0.02}, {1.0, 0.8}, {2.0, 0.005}};
    for (auto [beta, rho] : fermi_pts) {
        const ThermoState st = make_state(beta, rho, 1.0, Statistics::fermi);
        worst_fug = std::max(
            worst_fug,
            std::abs(density_from_fugacity(beta, st.z, 1.0, Statistics::fermi) - rho) / rho);
    }
    const std::pair<double, double> bose_pts[] = {{1.0, 0.03}, {0.5, 0.08}};
    for (auto [beta, rho] : bose_pts) {
        const ThermoState st = make_state(beta, rho, 1.0, Statistics::bose);
        worst_fug = std::max(
            worst_fug,
            std::abs(density_from_fugacity(beta, st.z, 1.0, Statistics::bose) - rho) / rho);
    }

    num::Rng rng(17);
    double worst_identity = 0.0;
    for (int t = 0; t < 10; ++t) { // 4-mode free-energy identity
        const Statistics stats = (t % 2) ? Statistics::bose : Statistics::fermi;
        const double beta = 0.8 + 0.15 * (t % 4);
        Eigen::MatrixXcd h, ho;
        if (stats == Statistics::fermi) {
            h = random_hermitian(4, 0.5, rng);
            ho = random_hermitian(4, 0.5, rng);
        } else {
            h = random_positive(4, 0.3, 0.5, rng);
            ho = random_positive(4, 0.3, 0.5, rng);
        }
        const OnePdm gamma = gibbs_one_pdm(h, beta, stats);
        const OnePdm omega(gamma_of(ho, stats), stats);
        worst_identity =
            std::max(worst_identity, free_energy_identity_check(omega, gamma, beta, h));
    }

    double worst_scaling = 0.0;
    const std::tuple<Statistics, double, double> scale_pts[] = {
        {Statistics::fermi, 0.7, 3.0},  {Statistics::fermi, 1.4, 0.2},
        {Statistics::fermi, 0.4, 40.0}, {Statistics::bose, 0.3, 0.1},
        {Statistics::bose, 0.5, 0.05}};
    for (auto [stats, beta, rho] : scale_pts) { // f0(beta, rho) = rho^{5/3} f0(beta rho^{2/3}, 1)
        const double lhs = ideal_free_energy(make_state(beta, rho, 1.0, stats));
        const double rhs = std::pow(rho, 5.0 / 3.0) *
                           ideal_free_energy(make_state(beta * std::pow(rho, 2.0 / 3.0), 1.0,
                                                        1.0, stats));
        worst_scaling = std::max(worst_scaling, std::abs(lhs - rhs) / std::abs(lhs));
    }

    detail = "fugacity " + num(worst_fug) + " <= 1e-10; identity " + num(worst_identity) +
             " <= 1e-10; f0 scaling " + num(worst_scaling) + " <= 1e-9";
    return worst_fug <= 1e-10 && worst_identity <= 1e-10 && worst_scaling <= 1e-9;
}

bool c8_expansion_scaling(std::string& detail) {
    double worst_total = 0.0;
    const std::pair<double, double> pts[] = {
        {0.7, 3.0}, {1.4, 0.2}, {0.4, 40.0}, {1.0, 1.0}, {0.6, 8.0}};
    for (auto [beta, rho] : pts) { // total(beta,rho,alpha) = rho^{5/3} total(beta rho^{2/3}, 1, alpha rho^{-1/3})
        const double alpha = 0.1;
        const double lhs = two_term_free_energy(beta, rho, alpha, 1.0, Statistics::fermi).total;
        const double rhs =
            std::pow(rho, 5.0 / 3.0) *
            two_term_free_energy(beta * std::pow(rho, 2.0 / 3.0), 1.0,
                                 alpha * std::pow(rho, -1.0 / 3.0), 1.0, Statistics::fermi)
                .total;
        worst_total = std::max(worst_total, std::abs(lhs - rhs) / std::abs(lhs));
    }

    // log-log slopes at fixed beta*rho^{2/3} = 1 over rho in [1e2, 1e6]
    const int k = 9;
    double sx = 0, sy0 = 0, sy1 = 0, sxx = 0, sxy0 = 0, sxy1 = 0;
    for (int i = 0; i < k; ++i) {
        const double rho = 1e2 * std::pow(1e4, double(i) / (k - 1));
        const double beta = std::pow(rho, -2.0 / 3.0);
        const auto r = two_term_free_energy(beta, rho, 0.1, 1.0, Statistics::fermi);
        const double x = std::log(rho), y0 = std::log(r.f0), y1 = std::log(-r.exchange_term);
        sx += x;
        sy0 += y0;
        sy1 += y1;
        sxx += x * x;
        sxy0 += x * y0;
        sxy1 += x * y1;
    }
    const double denom = k * sxx - sx * sx;
    const double slope_f0 = (k * sxy0 - sx * sy0) / denom;
    const double slope_ex = (k * sxy1 - sx * sy1) / denom;

    detail = "total scaling " + num(worst_total) + " <= 1e-9; slopes " +
             num(std::abs(slope_f0 - 5.0 / 3.0)) + ", " + num(std::abs(slope_ex - 4.0 / 3.0)) +
             " <= 0.01";
    return worst_total <= 1e-9 && std::abs(slope_f0 - 5.0 / 3.0) <= 0.01 &&
           std::abs(slope_ex - 4.0 / 3.0) <= 0.01;
}

bool c9_eta_construction(std::string& detail) {
    const EtaCutoff eta = build_eta();
    const bool unit = eta.unit_profile()(0.0) == 1.0;
    const bool support =
        eta(1.0) == 0.0 && eta(1.2) == 0.0 && eta(2.0) == 0.0 && eta(5.0) == 0.0;

    const double hat0 = eta.fourier(0.0);
    double worst_hat = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double kk = eta.fourier_cutoff() * i / 400.0;
        worst_hat = std::min(worst_hat, eta.fourier(kk));
    }

    auto d4 = [&](double h) { // even extension around 0
        auto f = [&](double x) { return eta.unit_profile()(std::abs(x)); };
        return (f(-2 * h) - 4 * f(-h) + 6 * f(0.0) - 4 * f(h) + f(2 * h)) / (h * h * h * h);
    };
    const double a = d4(0.02), b = d4(0.01), c = d4(0.005);
    const bool stable = std::abs(b / a - 1.0) <= 0.10 && std::abs(c / b - 1.0) <= 0.10;

    detail = std::string("eta(0)=1 ") + (unit ? "yes" : "NO") + ", support " +
             (support ? "exact" : "NO") + ", min hat " + num(worst_hat) + " >= " +
             num(-1e-8 * hat0) + ", d4 refinement ratios " + num(std::abs(b / a - 1.0)) + "/" +
             num(std::abs(c / b - 1.0)) + " <= 0.10";
    return unit && support && worst_hat >= -1e-8 * hat0 && stable;
}

} // namespace

int main() {
    std::printf("acceptance suite: two-term jellium free energy library\n");
    criterion(1, "exchange-route-equivalence", c1_exchange_routes);
    criterion(2, "coulomb-decomposition", c2_coulomb_decomposition);
    criterion(3, "lemma-inequality-sweeps", c3_lemma_sweeps);
    criterion(4, "appendix-identities", c4_appendix_identities);
    criterion(5, "pair-counting-oracle", c5_pair_oracle);
    criterion(6, "entropy-suite", c6_entropy_suite);
    criterion(7, "thermodynamic-consistency", c7_thermodynamic_consistency);
    criterion(8, "two-term-expansion-scaling", c8_expansion_scaling);
    criterion(9, "smooth-cutoff-construction", c9_eta_construction);
    std::printf("[NOTE] 10 asymptotic-error-constants       not reproducible at desk scale by "
                "design: the thermodynamic-limit error bounds carry non-constructive "
                "constants; every constructive ingredient is verified above\n");
    std::printf("%d/9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
