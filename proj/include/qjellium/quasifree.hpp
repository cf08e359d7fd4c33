#pragma once

// Quasi-free-state algebra: periodic-box one-particle density matrices and
// their localization cutoff, pair counting, relative entropy between
// quasi-free states, and the one-particle free-energy identity.
//
// Translation-invariant states on a box of side L are diagonal in the
// plane-wave basis p in (2 pi / L) Z^3.  They are stored as (mode, occupation)
// lists, never as dense matrices: at the contract's own operating point
// (L = 20, beta = 1) the retained mode count is ~2e4, far past dense-matrix
// reach, while every contracted observable (trace, spectrum, position kernel)
// reads straight off the diagonal.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qjellium/coulomb_split.hpp"
#include "qjellium/errors.hpp"
#include "qjellium/eta.hpp"
#include "qjellium/exchange.hpp"
#include "qjellium/ideal_gas.hpp"
#include "qjellium/numerics/quadrature.hpp"
#include "qjellium/numerics/stable.hpp"
#include "qjellium/one_pdm.hpp"
#include "qjellium/statistics.hpp"

namespace qjellium {

namespace detail {

inline std::uint64_t lattice_key(const Eigen::Vector3i& m) {
    auto enc = [](int v) { return std::uint64_t(std::uint32_t(v + (1 << 20))) & 0x1fffff; };
    return enc(m.x()) | (enc(m.y()) << 21) | (enc(m.z()) << 42);
}

// x ln x extended by continuity to 0 at the origin (tiny negatives from
// eigensolver noise land there too)
inline double xlnx(double x) { return x < 1e-300 ? 0.0 : x * std::log(x); }

} // namespace detail

struct LatticeMode {
    Eigen::Vector3i index; // p = (2 pi / L) * index
    double occupation;
};

// Translation-invariant one-particle density matrix on the momentum lattice of
// an L-box: diagonal occupations, one mode per retained lattice point.
class PeriodicGamma {
public:
    PeriodicGamma(double box_side, Statistics stats, std::vector<LatticeMode> modes)
        : L_(box_side), stats_(stats), modes_(std::move(modes)) {
        if (!(L_ > 0.0)) throw domain_error("PeriodicGamma: need box side L > 0");
        if (modes_.empty()) throw domain_error("PeriodicGamma: empty mode set");
        for (const auto& m : modes_) {
            if (m.occupation < -1e-10)
                throw domain_error("PeriodicGamma: negative occupation");
            if (stats_ == Statistics::fermi && m.occupation > 1.0 + 1e-10)
                throw domain_error("PeriodicGamma: Fermi occupation exceeds 1");
            lookup_.emplace(detail::lattice_key(m.index), m.occupation);
        }
    }

    double box_side() const { return L_; }
    double volume() const { return L_ * L_ * L_; }
    double spacing() const { return 2.0 * M_PI / L_; }
    Statistics stats() const { return stats_; }
    const std::vector<LatticeMode>& modes() const { return modes_; }

    // expected particle number in the box; density() is the per-volume trace
    double trace() const {
        double s = 0.0;
        for (const auto& m : modes_) s += m.occupation;
        return s;
    }
    double density() const { return trace() / volume(); }

    double min_occupation() const {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& m : modes_) v = std::min(v, m.occupation);
        return v;
    }
    double max_occupation() const {
        double v = -std::numeric_limits<double>::infinity();
        for (const auto& m : modes_) v = std::max(v, m.occupation);
        return v;
    }

    // occupation at a lattice point; modes outside the retained set are 0
    double occupation_at(const Eigen::Vector3i& index) const {
        const auto it = lookup_.find(detail::lattice_key(index));
        return it == lookup_.end() ? 0.0 : it->second;
    }

    // position kernel gamma(x; y) at separation dx = x - y:
    //   (1/L^3) sum_p gamma(p) e^{i p . dx},
    // real because the mode set is inversion-symmetric
    double kernel(const Eigen::Vector3d& dx) const {
        const double dq = spacing();
        double s = 0.0, comp = 0.0;
        for (const auto& m : modes_) {
            const double phase = dq * m.index.cast<double>().dot(dx);
            const double y = m.occupation * std::cos(phase) - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        return s / volume();
    }

private:
    double L_;
    Statistics stats_;
    std::vector<LatticeMode> modes_;
    std::unordered_map<std::uint64_t, double> lookup_;
};

// gamma_0 on the L-box: occupations gamma_0(p) at p = (2 pi / L) m for all
// |m_i| <= modes_per_axis, keeping modes with occupation > 1e-14.  The cutoff
// must itself be generous enough that the discarded boundary shell is below
// that threshold, else the truncation is reported as an error.
inline PeriodicGamma periodic_gamma0(double box_side, int modes_per_axis,
                                     const ThermoState& state) {
    if (!(box_side > 0.0)) throw domain_error("periodic_gamma0: need L > 0");
    if (modes_per_axis < 0) throw domain_error("periodic_gamma0: need modes_per_axis >= 0");
    const double dq = 2.0 * M_PI / box_side;
    // the innermost discarded lattice point sits at p = dq (modes_per_axis + 1)
    const double p_edge = dq * double(modes_per_axis + 1);
    const double edge_occ = momentum_occupation(p_edge, state.beta, state.z, state.stats);
    if (edge_occ > 1e-14)
        throw truncation_error("periodic_gamma0: mode cutoff discards occupation above 1e-14",
                               edge_occ);
    std::vector<LatticeMode> modes;
    for (int i = -modes_per_axis; i <= modes_per_axis; ++i)
        for (int j = -modes_per_axis; j <= modes_per_axis; ++j)
            for (int k = -modes_per_axis; k <= modes_per_axis; ++k) {
                const double p = dq * std::sqrt(double(i) * i + double(j) * j + double(k) * k);
                const double occ =
                    momentum_occupation(p, state.beta, state.z, state.stats);
                if (occ > 1e-14) modes.push_back({Eigen::Vector3i(i, j, k), occ});
            }
    return PeriodicGamma(box_side, state.stats, std::move(modes));
}

// gamma_d: the localization cutoff applied to a translation-invariant state,
//   gamma_d(x; y) = gamma_0(x; y) eta_d^per(x - y).
// Eigenvalues are the lattice convolution of eta^_d with gamma_0(p); they are
// evaluated on demand (the convolution output inherits eta^'s slow e^{-c sqrt k}
// tail, so materializing every mode above 1e-14 is hopeless, while any single
// eigenvalue is an exact finite sum over gamma_0's retained modes).  The
// position kernel uses the product form, which vanishes *identically* at
// separations >= d.
class CutoffGamma {
public:
    CutoffGamma(PeriodicGamma base, EtaCutoff eta)
        : base_(std::move(base)), eta_(std::move(eta)) {
        if (!(2.0 * eta_.scale() <= base_.box_side()))
            throw domain_error("CutoffGamma: localization needs 2 d <= L");
        if (eta_.period() != 0.0 && eta_.period() != base_.box_side())
            throw domain_error("CutoffGamma: eta was periodized for a different box");
    }

    const PeriodicGamma& base() const { return base_; }
    const EtaCutoff& eta() const { return eta_; }
    double scale() const { return eta_.scale(); }

    // eta_d^per(dx) = sum_m eta_d(|dx + m L|); with 2d <= L only nearest
    // images can contribute
    double eta_periodized(const Eigen::Vector3d& dx) const {
        const double L = base_.box_side();
        double s = 0.0;
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j)
                for (int k = -1; k <= 1; ++k) {
                    const Eigen::Vector3d shifted = dx + L * Eigen::Vector3d(i, j, k);
                    const double r = shifted.norm();
                    if (r < eta_.scale()) s += eta_(r);
                }
        return s;
    }

    // eigenvalue at lattice point p = (2 pi / L) m:
    //   gamma_d(p) = (1/L^3) sum_q eta^_d(|p - q|) gamma_0(q)
    // -- an exact finite sum over gamma_0's retained modes
    double eigenvalue(const Eigen::Vector3i& index) const {
        const double dq = base_.spacing();
        double s = 0.0, comp = 0.0;
        for (const auto& m : base_.modes()) {
            const double k = dq * (index - m.index).cast<double>().norm();
            const double y = eta_.fourier(k) * m.occupation - comp;
            const double t = s + y;
            comp = (t - s) - y;
            s = t;
        }
        return s / base_.volume();
    }

    // gamma_d(x; y) = gamma_0(x; y) eta_d^per(x - y): exactly zero at
    // separation >= d (within the fundamental cell)
    double kernel(const Eigen::Vector3d& dx) const {
        const double e = eta_periodized(dx);
        return e == 0.0 ? 0.0 : base_.kernel(dx) * e;
    }

    // diagonal kernel is untouched (eta(0) = 1), so the trace is preserved
    double trace() const { return base_.trace(); }

private:
    PeriodicGamma base_;
    EtaCutoff eta_;
};

inline CutoffGamma apply_eta_cutoff(const PeriodicGamma& gamma0, const EtaCutoff& eta) {
    return CutoffGamma(gamma0, eta);
}

// Expected pair count Tr[n_X (n_X - 1) Gamma_gamma] of the quasi-free state
// with 1-pdm gamma, counted inside the range of the orthogonal projection X:
//   (tr[X gamma])^2 -+ tr[(X gamma)^2]   (Fermi -, Bose +).
inline double pair_count_quasifree(const OnePdm& gamma, const Eigen::MatrixXcd& X) {
    if (X.rows() != X.cols() || X.rows() != gamma.modes())
        throw domain_error("pair_count_quasifree: projection dimension mismatch");
    const double scale = 1.0 + X.cwiseAbs().maxCoeff();
    if ((X - X.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw domain_error("pair_count_quasifree: X is not Hermitian");
    if ((X * X - X).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw domain_error("pair_count_quasifree: X is not idempotent");
    const Eigen::MatrixXcd xg = X * gamma.matrix();
    const std::complex<double> t1 = xg.trace();
    const std::complex<double> t2 = (xg * xg).trace();
    return t1.real() * t1.real() + quantum_sign(gamma.stats()) * t2.real();
}

// Per-volume pair count of the infinite-volume ideal gas, localized through
// the ball-overlap weight:
//   4 pi \int_0^{2r} s^2 J_r(s) [rho^2 -+ n gamma~_0(s)^2] ds.
// Integration is cell-aligned on the gamma~ table's own grid (the spline is
// smooth inside a cell; J_r is a polynomial).
inline double integrated_pair_count(const GammaTilde& gt, double rho, double n, double r) {
    if (!(r > 0.0)) throw domain_error("integrated_pair_count: need r > 0");
    const double sign = quantum_sign(gt.state().stats);
    auto f = [&](double s) {
        const double g = gt(s);
        return s * s * ball_overlap(r, s) * (rho * rho + sign * n * g * g);
    };
    const auto& grid = gt.profile().grid();
    const double upper = 2.0 * r;
    double sum = 0.0, comp = 0.0;
    double a = 0.0;
    for (std::size_t i = 1; i < grid.size() && a < upper; ++i) {
        const double b = std::min(grid[i], upper);
        if (b <= a) continue;
        const double y = num::integrate(f, a, b, 1e-12, 16) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        a = b;
    }
    if (a < upper) { // past the table: gamma~ is 0 there, the rest is exact
        sum += num::integrate([&](double s) { return s * s * ball_overlap(r, s) * rho * rho; },
                              a, upper, 1e-12, 64);
    }
    return 4.0 * M_PI * sum;
}

inline double integrated_pair_count(const ThermoState& state, double r) {
    const GammaTilde gt(state);
    return integrated_pair_count(gt, state.rho, state.n, r);
}

// Relative entropy between the quasi-free states with 1-pdms omega and gamma:
//   S = tr[omega (ln omega - ln gamma)] +- tr[(1 -+ omega)(ln(1 -+ omega) - ln(1 -+ gamma))]
// (Fermi upper signs, Bose lower), evaluated through both eigendecompositions
// -- matrix functions, never entrywise.  A gamma eigenvalue at a branch point
// (0, or 1 for Fermi) with weight from omega makes the entropy infinite; that
// is reported as +infinity, not as overflow or an exception.
inline double rel_entropy_quasifree(const OnePdm& omega, const OnePdm& gamma) {
    if (omega.stats() != gamma.stats())
        throw domain_error("rel_entropy_quasifree: mixed statistics");
    if (omega.modes() != gamma.modes())
        throw domain_error("rel_entropy_quasifree: dimension mismatch");
    const bool fermi = omega.stats() == Statistics::fermi;
    const double inf = std::numeric_limits<double>::infinity();

    // own-eigenbasis terms of omega
    double s_own = 0.0;
    for (Eigen::Index i = 0; i < omega.modes(); ++i) {
        const double t = omega.eigenvalues()(i);
        s_own += detail::xlnx(t);
        s_own += fermi ? detail::xlnx(1.0 - t) : -detail::xlnx(1.0 + t);
    }

    // cross terms: weights of omega in gamma's eigenbasis
    const Eigen::MatrixXcd w =
        gamma.eigenvectors().adjoint() * omega.matrix() * gamma.eigenvectors();
    const double weight_tol = 1e-12 * (1.0 + omega.trace());
    double s_cross = 0.0, total_abs = std::abs(s_own);
    for (Eigen::Index j = 0; j < gamma.modes(); ++j) {
        const double g = gamma.eigenvalues()(j);
        const double wj = w(j, j).real();
        // ln gamma branch at g = 0
        if (g < 1e-300) {
            if (wj > weight_tol) return inf;
        } else {
            s_cross -= wj * std::log(g);
            total_abs += std::abs(wj * std::log(g));
        }
        if (fermi) {
            const double cg = 1.0 - g, cw = 1.0 - wj;
            if (cg < 1e-300) { // ln(1 - gamma) branch at g = 1
                if (cw > weight_tol) return inf;
            } else {
                s_cross -= cw * std::log(cg);
                total_abs += std::abs(cw * std::log(cg));
            }
        } else {
            s_cross += (1.0 + wj) * std::log1p(g);
            total_abs += (1.0 + wj) * std::log1p(g);
        }
    }

    const double s = s_own + s_cross;
    const double slack = 1e-12 * (1.0 + total_abs);
    if (s < -slack)
        throw consistency_error("rel_entropy_quasifree: negative entropy beyond roundoff");
    return std::max(s, 0.0);
}

// Compression of a one-pdm to the range of an orthogonal projection X: an
// orthonormal basis B of ran X is extracted and B* gamma B returned as a state
// on rank(X) modes.  This is the one-particle shadow of restricting the
// quasi-free state to the subalgebra of modes in ran X.
inline OnePdm restrict_one_pdm(const OnePdm& gamma, const Eigen::MatrixXcd& X) {
    if (X.rows() != X.cols() || X.rows() != gamma.modes())
        throw domain_error("restrict_one_pdm: projection dimension mismatch");
    const double scale = 1.0 + X.cwiseAbs().maxCoeff();
    if ((X - X.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
        (X * X - X).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw domain_error("restrict_one_pdm: X is not an orthogonal projection");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(X);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        if (es.eigenvalues()(i) > 0.5) ++rank;
    if (rank == 0) throw domain_error("restrict_one_pdm: zero-rank projection");
    const Eigen::MatrixXcd b = es.eigenvectors().rightCols(rank); // eigenvalues ascend
    return OnePdm(b.adjoint() * gamma.matrix() * b, gamma.stats());
}

// Gibbs one-pdm of the one-particle Hamiltonian h: (e^{beta h} - sign)^{-1},
// i.e. (e^{beta h} + 1)^{-1} Fermi and (e^{beta h} - 1)^{-1} Bose (the latter
// needs spec(h) > 0).
inline OnePdm gibbs_one_pdm(const Eigen::MatrixXcd& h, double beta, Statistics stats) {
    if (!(beta > 0.0)) throw domain_error("gibbs_one_pdm: need beta > 0");
    if (h.rows() != h.cols() || h.rows() == 0)
        throw domain_error("gibbs_one_pdm: h must be square and nonempty");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + h.cwiseAbs().maxCoeff()))
        throw domain_error("gibbs_one_pdm: h is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXd occ(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double x = beta * es.eigenvalues()(i);
        if (stats == Statistics::bose && !(x > 0.0))
            throw domain_error("gibbs_one_pdm: Bose Gibbs state needs spec(h) > 0");
        occ(i) = stats == Statistics::fermi
                     ? (x > 0.0 ? std::exp(-x) / (1.0 + std::exp(-x))
                                : 1.0 / (1.0 + std::exp(x)))
                     : 1.0 / std::expm1(x);
    }
    return OnePdm(es.eigenvectors() * occ.asDiagonal() * es.eigenvectors().adjoint(), stats);
}

// One-particle entropy density s(t) = -t ln t -+ (1 -+ t) ln(1 -+ t) summed
// over the spectrum of omega.
inline double one_pdm_entropy(const OnePdm& omega) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < omega.modes(); ++i) {
        const double t = omega.eigenvalues()(i);
        s -= detail::xlnx(t);
        s -= omega.stats() == Statistics::fermi ? detail::xlnx(1.0 - t)
                                                : -detail::xlnx(1.0 + t);
    }
    return s;
}

// Grand-canonical free energy -+ beta^{-1} tr ln(1 +- e^{-beta h}) of the
// quasi-free Gibbs state of h.
inline double quasifree_free_energy(const Eigen::MatrixXcd& h, double beta, Statistics stats) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    double f = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double x = beta * es.eigenvalues()(i);
        if (stats == Statistics::fermi) {
            f -= num::softplus(-x) / beta; // ln(1 + e^{-x}), stable both signs
        } else {
            if (!(x > 0.0))
                throw domain_error("quasifree_free_energy: Bose needs spec(h) > 0");
            f += num::log1mexp(x) / beta; // ln(1 - e^{-x})
        }
    }
    return f;
}

// Residual of the free-energy identity at the one-particle level,
//   beta^{-1} S(Gamma_omega || Gamma_gamma) = tr[h omega] - beta^{-1} tr s(omega) - F,
// where gamma must be the Gibbs one-pdm of h and F its free energy.  Returns
// |LHS - RHS|; contract: <= 1e-10 (1 + |F|).
inline double free_energy_identity_check(const OnePdm& omega, const OnePdm& gamma, double beta,
                                         const Eigen::MatrixXcd& h) {
    if (!(beta > 0.0)) throw domain_error("free_energy_identity_check: need beta > 0");
    const double lhs = rel_entropy_quasifree(omega, gamma) / beta;
    const double energy = (h * omega.matrix()).trace().real();
    const double f = quasifree_free_energy(h, beta, omega.stats());
    const double rhs = energy - one_pdm_entropy(omega) / beta - f;
    return std::abs(lhs - rhs);
}

} // namespace qjellium
