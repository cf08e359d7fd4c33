#pragma once

// Random instances for property tests: Haar-distributed unitaries (QR of a
// complex Ginibre matrix with the phase fix of the R diagonal), one-particle
// density matrices with spectra kept clear of the entropy branch points, and
// random orthogonal projections.  All streams go through the deterministic
// project Rng so sweeps are reproducible byte-for-byte.

#include <Eigen/Dense>

#include <complex>

#include "qjellium/errors.hpp"
#include "qjellium/numerics/rng.hpp"
#include "qjellium/one_pdm.hpp"
#include "qjellium/statistics.hpp"

namespace qjellium::num {

inline Eigen::MatrixXcd haar_unitary(int m, Rng& rng) {
    if (m <= 0) throw domain_error("haar_unitary: need m > 0");
    Eigen::MatrixXcd g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = std::complex<double>(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // without this phase fix the QR map is not Haar (R's diagonal phases leak)
    for (int j = 0; j < m; ++j) {
        const std::complex<double> d = r(j, j);
        q.col(j) *= (std::abs(d) > 0.0) ? d / std::abs(d) : 1.0;
    }
    return q;
}

// gamma = V diag(u) V* with Haar V; u uniform in (0.05, 0.95) for Fermi and
// (0.05, 3) for Bose -- away from the branch points of t ln t and (1 -+ t).
inline OnePdm random_one_pdm(int m, Statistics stats, Rng& rng) {
    const Eigen::MatrixXcd v = haar_unitary(m, rng);
    Eigen::VectorXd u(m);
    const double hi = stats == Statistics::fermi ? 0.95 : 3.0;
    for (int i = 0; i < m; ++i) u(i) = rng.uniform(0.05, hi);
    return OnePdm(v * u.asDiagonal() * v.adjoint(), stats);
}

// rank-r orthogonal projection X = V_r V_r* from the first r Haar columns
inline Eigen::MatrixXcd random_projection(int m, int rank, Rng& rng) {
    if (rank < 0 || rank > m) throw domain_error("random_projection: need 0 <= rank <= m");
    const Eigen::MatrixXcd v = haar_unitary(m, rng);
    const Eigen::MatrixXcd vr = v.leftCols(rank);
    return vr * vr.adjoint();
}

} // namespace qjellium::num
