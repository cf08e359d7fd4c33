#pragma once

// One-particle density matrix of a quasi-free state on finitely many modes.
// Fermi spectra live in [0,1], Bose spectra in [0,inf); both are validated at
// construction (tolerance 1e-10) together with Hermiticity (1e-12), and the
// eigendecomposition is computed once and cached -- every downstream
// operation (pair counting, relative entropy, restriction) consumes it.

#include <Eigen/Dense>

#include <cmath>
#include <utility>

#include "qjellium/errors.hpp"
#include "qjellium/statistics.hpp"

namespace qjellium {

class OnePdm {
public:
    using Matrix = Eigen::MatrixXcd;

    OnePdm(Matrix matrix, Statistics stats) : matrix_(std::move(matrix)), stats_(stats) {
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0)
            throw domain_error("OnePdm: matrix must be square and nonempty");
        const double scale = matrix_.cwiseAbs().maxCoeff();
        const double herm_defect = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
        if (herm_defect > 1e-12 * (1.0 + scale))
            throw domain_error("OnePdm: matrix is not Hermitian");
        matrix_ = 0.5 * (matrix_ + matrix_.adjoint().eval());

        Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_);
        if (es.info() != Eigen::Success) throw numeric_error("OnePdm: eigensolver failed", 0.0);
        evals_ = es.eigenvalues();
        evecs_ = es.eigenvectors();
        const double lo = evals_.minCoeff();
        if (lo < -1e-10) throw domain_error("OnePdm: negative occupation eigenvalue");
        if (stats_ == Statistics::fermi && evals_.maxCoeff() > 1.0 + 1e-10)
            throw domain_error("OnePdm: Fermi occupation eigenvalue exceeds 1");
    }

    const Matrix& matrix() const { return matrix_; }
    Statistics stats() const { return stats_; }
    Eigen::Index modes() const { return matrix_.rows(); }

    // expected particle number
    double trace() const { return evals_.sum(); }

    // ascending, paired column-for-column with eigenvectors()
    const Eigen::VectorXd& eigenvalues() const { return evals_; }
    const Matrix& eigenvectors() const { return evecs_; }

private:
    Matrix matrix_;
    Statistics stats_;
    Eigen::VectorXd evals_;
    Matrix evecs_;
};

} // namespace qjellium
