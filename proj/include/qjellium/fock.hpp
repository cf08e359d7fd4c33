#pragma once

// Brute-force exact computations on small Fock spaces.  Everything here is
// dense and O(dim^2..3); the module exists as a ground-truth oracle for the
// quasi-free formulas, not as a simulation tool.  Basis states are occupation
// tuples ordered by mode index; fermionic matrix elements carry the usual
// sign strings from that ordering.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "qjellium/errors.hpp"
#include "qjellium/quasifree.hpp"
#include "qjellium/statistics.hpp"

namespace qjellium {

// Occupation-basis index bookkeeping for M modes.  Fermi: bit i of the basis
// index is the occupation of mode i (dimension 2^M, M <= 12).  Bose: base
// (n_max+1) digits (dimension (n_max+1)^M, M <= 6).  Both statistics share a
// hard dimension cap of 4096 so that dense operators stay affordable; this is
// exactly 2^12 and is what keeps any single oracle call fast.
class FockSpace {
public:
    FockSpace(Statistics stats, int modes, int n_max = -1)
        : stats_(stats), modes_(modes) {
        if (modes < 1) throw domain_error("FockSpace: need at least one mode");
        if (stats == Statistics::fermi) {
            if (modes > 12) throw domain_error("FockSpace: Fermi mode count capped at 12");
            if (n_max != -1 && n_max != 1)
                throw domain_error("FockSpace: Fermi occupation cap is fixed at 1");
            cap_ = 1;
        } else {
            if (modes > 6) throw domain_error("FockSpace: Bose mode count capped at 6");
            if (n_max < 1) throw domain_error("FockSpace: Bose space needs an occupation cap >= 1");
            cap_ = n_max;
        }
        double d = 1.0;
        for (int i = 0; i < modes_; ++i) d *= cap_ + 1.0;
        if (d > 4096.0)
            throw domain_error("FockSpace: dimension exceeds the dense-oracle cap of 4096");
        dim_ = 1;
        strides_.resize(static_cast<std::size_t>(modes_));
        for (int i = 0; i < modes_; ++i) {
            strides_[static_cast<std::size_t>(i)] = dim_;
            dim_ *= cap_ + 1;
        }
    }

    Statistics stats() const { return stats_; }
    int modes() const { return modes_; }
    int cap() const { return cap_; }
    Eigen::Index dimension() const { return dim_; }

    int occupation(Eigen::Index state, int mode) const {
        return static_cast<int>((state / strides_[static_cast<std::size_t>(mode)]) % (cap_ + 1));
    }
    Eigen::Index stride(int mode) const { return strides_[static_cast<std::size_t>(mode)]; }

    bool operator==(const FockSpace& o) const {
        return stats_ == o.stats_ && modes_ == o.modes_ && cap_ == o.cap_;
    }
    bool operator!=(const FockSpace& o) const { return !(*this == o); }

private:
    Statistics stats_;
    int modes_;
    int cap_ = 1;
    Eigen::Index dim_ = 0;
    std::vector<Eigen::Index> strides_;
};

namespace detail {

// Enumerate the nonzero matrix elements of a_i^dag a_j on the occupation
// basis: calls visit(target, source, amplitude).  Amplitudes are real; the
// fermionic sign is the parity of the occupied modes the operators move
// across.  Bose transitions that would exceed the cap are dropped, which is
// precisely the compression of the true operator onto the capped space.
template <class Visitor>
void for_each_transfer_element(const FockSpace& sp, int i, int j, Visitor&& visit) {
    if (i < 0 || i >= sp.modes() || j < 0 || j >= sp.modes())
        throw domain_error("transfer operator: mode index out of range");
    const Eigen::Index dim = sp.dimension();
    const bool fermi = sp.stats() == Statistics::fermi;
    for (Eigen::Index s = 0; s < dim; ++s) {
        const int nj = sp.occupation(s, j);
        if (nj == 0) continue;
        if (i == j) {
            visit(s, s, static_cast<double>(nj));
            continue;
        }
        const int ni = sp.occupation(s, i);
        if (ni >= sp.cap()) continue; // Fermi Pauli block / Bose cap compression
        const Eigen::Index t = s - sp.stride(j) + sp.stride(i);
        double amp;
        if (fermi) {
            // parity of occupied modes strictly below j in s, then strictly
            // below i after mode j has been emptied
            int par = 0;
            for (int k = 0; k < j; ++k) par += sp.occupation(s, k);
            for (int k = 0; k < i; ++k) par += k == j ? 0 : sp.occupation(s, k);
            amp = par % 2 == 0 ? 1.0 : -1.0;
        } else {
            amp = std::sqrt(static_cast<double>(nj) * (ni + 1.0));
        }
        visit(t, s, amp);
    }
}

} // namespace detail

// Dense a_i^dag a_j (real amplitudes).
inline Eigen::MatrixXd transfer_operator(const FockSpace& sp, int i, int j) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(sp.dimension(), sp.dimension());
    detail::for_each_transfer_element(
        sp, i, j, [&](Eigen::Index t, Eigen::Index s, double amp) { a(t, s) += amp; });
    return a;
}

// Second quantization dGamma(h) = sum_ij h_ij a_i^dag a_j as a dense matrix.
inline Eigen::MatrixXcd second_quantized(const FockSpace& sp, const Eigen::MatrixXcd& h) {
    if (h.rows() != sp.modes() || h.cols() != sp.modes())
        throw domain_error("second_quantized: h must be modes x modes");
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + h.cwiseAbs().maxCoeff()))
        throw domain_error("second_quantized: h must be Hermitian");
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(sp.dimension(), sp.dimension());
    for (int i = 0; i < sp.modes(); ++i)
        for (int j = 0; j < sp.modes(); ++j) {
            if (h(i, j) == std::complex<double>(0.0, 0.0)) continue;
            detail::for_each_transfer_element(
                sp, i, j,
                [&](Eigen::Index t, Eigen::Index s, double amp) { big(t, s) += h(i, j) * amp; });
        }
    return big;
}

// Density matrix on a FockSpace: Hermitian, unit trace, positive up to
// roundoff.  The spectral decomposition is computed at construction (it both
// validates positivity and feeds the entropy routines).
class FockState {
public:
    FockState(FockSpace space, Eigen::MatrixXcd rho) : space_(space), rho_(std::move(rho)) {
        if (rho_.rows() != space_.dimension() || rho_.cols() != space_.dimension())
            throw domain_error("FockState: matrix does not match the space dimension");
        const double scale = rho_.cwiseAbs().maxCoeff();
        if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + scale))
            throw domain_error("FockState: density matrix must be Hermitian");
        rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
        if (std::abs(rho_.trace().real() - 1.0) > 1e-12)
            throw domain_error("FockState: trace must equal one");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_);
        if (es.info() != Eigen::Success)
            throw numeric_error("FockState: eigendecomposition failed", 0.0);
        spectrum_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
        if (spectrum_.minCoeff() < -1e-12)
            throw domain_error("FockState: density matrix has a negative eigenvalue");
    }

    // Trusted assembly from a known eigensystem (columns of v orthonormal,
    // weights w >= 0 summing to one); used by the Gibbs factory so the
    // spectral data is not recomputed.  The assembled matrix is still checked.
    static FockState from_eigensystem(const FockSpace& space, const Eigen::MatrixXcd& v,
                                      const Eigen::VectorXd& w) {
        if (v.rows() != space.dimension() || v.cols() != space.dimension() ||
            w.size() != space.dimension())
            throw domain_error("FockState: eigensystem does not match the space dimension");
        if (w.minCoeff() < -1e-12) throw domain_error("FockState: negative weight");
        if (std::abs(w.sum() - 1.0) > 1e-12) throw domain_error("FockState: weights must sum to one");
        FockState st(space);
        st.rho_ = v * w.asDiagonal() * v.adjoint();
        st.rho_ = 0.5 * (st.rho_ + st.rho_.adjoint()).eval();
        // store ascending to match the eigensolver convention
        std::vector<Eigen::Index> order(static_cast<std::size_t>(w.size()));
        for (Eigen::Index k = 0; k < w.size(); ++k) order[static_cast<std::size_t>(k)] = k;
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return w(a) < w(b); });
        st.spectrum_.resize(w.size());
        st.vectors_.resize(v.rows(), v.cols());
        for (Eigen::Index k = 0; k < w.size(); ++k) {
            st.spectrum_(k) = w(order[static_cast<std::size_t>(k)]);
            st.vectors_.col(k) = v.col(order[static_cast<std::size_t>(k)]);
        }
        return st;
    }

    const FockSpace& space() const { return space_; }
    const Eigen::MatrixXcd& rho() const { return rho_; }
    const Eigen::VectorXd& spectrum() const { return spectrum_; } // ascending
    const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }

private:
    explicit FockState(FockSpace space) : space_(space) {}

    FockSpace space_;
    Eigen::MatrixXcd rho_;
    Eigen::VectorXd spectrum_;
    Eigen::MatrixXcd vectors_;
};

// Union bound on the Gibbs weight a Bose cap discards: sum_j q_j^{cap+1}
// with q_j = e^{-eps_j} over the eigenvalues of h.
inline double bose_tail_weight(const Eigen::MatrixXcd& h, int cap) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    double tail = 0.0;
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
        const double eps = es.eigenvalues()(k);
        if (!(eps > 0.0)) return std::numeric_limits<double>::infinity();
        tail += std::exp(-static_cast<double>(cap + 1) * eps);
    }
    return tail;
}

// Smallest cap whose discarded weight stays below the target (default well
// under the 1e-8 acceptance threshold of quasifree_gibbs).
inline FockSpace adaptive_bose_space(const Eigen::MatrixXcd& h, double weight_target = 1e-9) {
    const int m = static_cast<int>(h.rows());
    for (int cap = 1;; ++cap) {
        double d = 1.0;
        for (int i = 0; i < m; ++i) d *= cap + 1.0;
        if (m > 6 || d > 4096.0)
            throw truncation_error("adaptive_bose_space: no cap meets the weight target "
                                   "within the dense-oracle dimension limit",
                                   bose_tail_weight(h, cap - 1));
        const double tail = bose_tail_weight(h, cap);
        if (std::isinf(tail))
            throw domain_error("adaptive_bose_space: Bose requires spec(h) > 0");
        if (tail < weight_target) return FockSpace(Statistics::bose, m, cap);
    }
}

// Gibbs state e^{-dGamma(h)} / Z on the given space.  The inverse temperature
// is absorbed into h.  For Bose the occupation cap must hold all but < 1e-8
// of the weight, otherwise the call refuses with the discarded bound.
inline FockState quasifree_gibbs(const Eigen::MatrixXcd& h, const FockSpace& space) {
    if (space.stats() == Statistics::bose) {
        const double tail = bose_tail_weight(h, space.cap());
        if (std::isinf(tail))
            throw domain_error("quasifree_gibbs: Bose requires spec(h) > 0");
        if (tail > 1e-8)
            throw truncation_error("quasifree_gibbs: occupation cap discards too much weight",
                                   tail);
    }
    const Eigen::MatrixXcd big = second_quantized(space, h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(big);
    if (es.info() != Eigen::Success)
        throw numeric_error("quasifree_gibbs: eigendecomposition failed", 0.0);
    const double lmin = es.eigenvalues().minCoeff();
    Eigen::VectorXd w = (-(es.eigenvalues().array() - lmin)).exp();
    w /= w.sum();
    return FockState::from_eigensystem(space, es.eigenvectors(), w);
}

// One-particle density matrix gamma_ij = tr[rho a_j^dag a_i].
inline Eigen::MatrixXcd one_pdm_exact(const FockState& st) {
    const FockSpace& sp = st.space();
    Eigen::MatrixXcd g(sp.modes(), sp.modes());
    for (int i = 0; i < sp.modes(); ++i)
        for (int j = 0; j < sp.modes(); ++j) {
            std::complex<double> acc(0.0, 0.0);
            // tr[rho A] = sum over elements A_{t,s} of rho_{s,t} amp
            detail::for_each_transfer_element(
                sp, j, i,
                [&](Eigen::Index t, Eigen::Index s, double amp) { acc += st.rho()(s, t) * amp; });
            g(i, j) = acc;
        }
    return g;
}

namespace detail {

inline Eigen::VectorXd subset_number_diagonal(const FockSpace& sp, const std::vector<int>& x) {
    std::vector<char> seen(static_cast<std::size_t>(sp.modes()), 0);
    for (int m : x) {
        if (m < 0 || m >= sp.modes())
            throw domain_error("mode subset: index out of range");
        if (seen[static_cast<std::size_t>(m)]) throw domain_error("mode subset: duplicate index");
        seen[static_cast<std::size_t>(m)] = 1;
    }
    Eigen::VectorXd n = Eigen::VectorXd::Zero(sp.dimension());
    for (Eigen::Index s = 0; s < sp.dimension(); ++s)
        for (int m : x) n(s) += sp.occupation(s, m);
    return n;
}

} // namespace detail

// Tr[n_X (n_X - 1) rho] with n_X the total number in the mode subset.
inline double pair_count_exact(const FockState& st, const std::vector<int>& x_modes) {
    const Eigen::VectorXd n = detail::subset_number_diagonal(st.space(), x_modes);
    double acc = 0.0;
    for (Eigen::Index s = 0; s < n.size(); ++s)
        acc += n(s) * (n(s) - 1.0) * st.rho()(s, s).real();
    return acc;
}

// Tr[n_X^2 (n_X - 1)^2 rho], the quantity the Wick-type fourth-moment bounds
// control.
inline double fourth_moment_exact(const FockState& st, const std::vector<int>& x_modes) {
    const Eigen::VectorXd n = detail::subset_number_diagonal(st.space(), x_modes);
    double acc = 0.0;
    for (Eigen::Index s = 0; s < n.size(); ++s) {
        const double p = n(s) * (n(s) - 1.0);
        acc += p * p * st.rho()(s, s).real();
    }
    return acc;
}

// Tr rho1 (ln rho1 - ln rho2) by double eigendecomposition.  Eigenvalues of a
// unit-trace matrix below the eigensolver floor (1e-15) count as off-support;
// weight beyond 1e-11 sitting on them reports +infinity.  Weight below that
// threshold is skipped, which perturbs the result by at most ~1e-11 |ln q|
// per absent direction -- negligible against the 1e-9 agreement contract.
inline double rel_entropy_exact(const FockState& a, const FockState& b) {
    if (a.space() != b.space())
        throw domain_error("rel_entropy_exact: states live on different spaces");
    const Eigen::Index dim = a.space().dimension();
    double own = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) own += detail::xlnx(std::max(a.spectrum()(k), 0.0));
    // weight of rho1 along each eigenvector of rho2
    const Eigen::MatrixXcd c = b.eigenvectors().adjoint() * a.rho() * b.eigenvectors();
    double cross = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double w = std::max(c(k, k).real(), 0.0);
        const double q = b.spectrum()(k);
        if (q <= 1e-15) {
            if (w > 1e-11) return std::numeric_limits<double>::infinity();
            continue;
        }
        cross += w * std::log(q);
    }
    double s = own - cross;
    const double slack = 1e-10 * (1.0 + std::abs(own) + std::abs(cross));
    if (s < -slack)
        throw consistency_error("rel_entropy_exact: negative result beyond roundoff slack");
    return std::max(s, 0.0);
}

// Trace distance ||rho1 - rho2||_1 (sum of absolute eigenvalues of the
// Hermitian difference).
inline double trace_norm_diff(const FockState& a, const FockState& b) {
    if (a.space() != b.space())
        throw domain_error("trace_norm_diff: states live on different spaces");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.rho() - b.rho());
    return es.eigenvalues().cwiseAbs().sum();
}

// Partial trace onto the kept modes (strictly increasing subset).  Reordering
// the kept modes to the front is a signed basis permutation for fermions:
// each basis state picks up the parity of interleaving its occupied kept
// modes past its occupied discarded ones.  With that sign in place the
// prefix partial trace (a plain index sum) is the physical restriction.
inline FockState restrict_state(const FockState& st, const std::vector<int>& keep) {
    const FockSpace& sp = st.space();
    if (keep.empty()) throw domain_error("restrict_state: must keep at least one mode");
    for (std::size_t r = 0; r < keep.size(); ++r) {
        if (keep[r] < 0 || keep[r] >= sp.modes())
            throw domain_error("restrict_state: mode index out of range");
        if (r > 0 && keep[r] <= keep[r - 1])
            throw domain_error("restrict_state: kept modes must be strictly increasing");
    }
    const FockSpace sub(sp.stats(), static_cast<int>(keep.size()),
                        sp.stats() == Statistics::fermi ? -1 : sp.cap());
    // split each full index into (kept digits, discarded digits, sign)
    std::vector<Eigen::Index> kept_ix(static_cast<std::size_t>(sp.dimension()));
    std::vector<Eigen::Index> disc_ix(static_cast<std::size_t>(sp.dimension()));
    std::vector<double> sign(static_cast<std::size_t>(sp.dimension()), 1.0);
    std::vector<char> is_kept(static_cast<std::size_t>(sp.modes()), 0);
    for (int m : keep) is_kept[static_cast<std::size_t>(m)] = 1;
    const bool fermi = sp.stats() == Statistics::fermi;
    for (Eigen::Index s = 0; s < sp.dimension(); ++s) {
        Eigen::Index k = 0, d = 0, kst = 1, dst = 1;
        int par = 0, kept_above = 0;
        for (int m = sp.modes() - 1; m >= 0; --m) {
            if (is_kept[static_cast<std::size_t>(m)])
                kept_above += sp.occupation(s, m);
            else
                par += sp.occupation(s, m) * kept_above;
        }
        for (int m = 0; m < sp.modes(); ++m) {
            if (is_kept[static_cast<std::size_t>(m)]) {
                k += kst * sp.occupation(s, m);
                kst *= sp.cap() + 1;
            } else {
                d += dst * sp.occupation(s, m);
                dst *= sp.cap() + 1;
            }
        }
        kept_ix[static_cast<std::size_t>(s)] = k;
        disc_ix[static_cast<std::size_t>(s)] = d;
        if (fermi && par % 2 != 0) sign[static_cast<std::size_t>(s)] = -1.0;
    }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(sub.dimension(), sub.dimension());
    for (Eigen::Index s = 0; s < sp.dimension(); ++s)
        for (Eigen::Index t = 0; t < sp.dimension(); ++t)
            if (disc_ix[static_cast<std::size_t>(s)] == disc_ix[static_cast<std::size_t>(t)])
                out(kept_ix[static_cast<std::size_t>(s)], kept_ix[static_cast<std::size_t>(t)]) +=
                    sign[static_cast<std::size_t>(s)] * sign[static_cast<std::size_t>(t)] *
                    st.rho()(s, t);
    return FockState(sub, std::move(out));
}

} // namespace qjellium
