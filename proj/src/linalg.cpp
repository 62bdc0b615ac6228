#include "cssdr/linalg.hpp"

#include <cmath>
#include <string>

namespace cssdr {

namespace {

constexpr double kConditionLimit = 1e12;

}  // namespace

Matrix sym_inverse(const Matrix& s, double ridge_scale, const char* what) {
    if (!s.allFinite()) {
        throw NumericError(std::string(what) + ": non-finite entries");
    }
    const Index k = s.rows();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    if (eig.info() != Eigen::Success) {
        throw NumericError(std::string(what) + ": eigendecomposition failed");
    }
    const Vector lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    const double lmin = lambda.minCoeff();
    const double trace = s.trace();
    if (!(trace > 0.0) || !(lmax > 0.0)) {
        throw NumericError(std::string(what) + ": matrix is not positive (trace " +
                           std::to_string(trace) + ")");
    }
    double ridge = 0.0;
    if (lmin <= lmax / kConditionLimit) {
        ridge = ridge_scale * trace / static_cast<double>(k);
        if (!(lmax + ridge > 0.0) || !(lmin + ridge > 0.0)) {
            throw NumericError(std::string(what) + ": singular even after ridge");
        }
    }
    Vector inv_lambda(k);
    for (Index i = 0; i < k; ++i) {
        inv_lambda[i] = 1.0 / (lambda[i] + ridge);
    }
    return eig.eigenvectors() * inv_lambda.asDiagonal() * eig.eigenvectors().transpose();
}

Matrix sym_inverse_strict(const Matrix& s, const char* what) {
    if (!s.allFinite()) {
        throw NumericError(std::string(what) + ": non-finite entries");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    if (eig.info() != Eigen::Success) {
        throw NumericError(std::string(what) + ": eigendecomposition failed");
    }
    const Vector lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    const double lmin = lambda.minCoeff();
    if (!(lmax > 0.0) || lmin <= lmax / kConditionLimit) {
        throw NumericError(std::string(what) + ": singular (condition number above 1e12)");
    }
    return eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

PseudoInverse sym_pseudo_inverse(const Matrix& s, double rel_cutoff) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    if (eig.info() != Eigen::Success) {
        throw NumericError("pseudo-inverse: eigendecomposition failed");
    }
    const Index k = s.rows();
    const Vector lambda = eig.eigenvalues();
    const double smax = lambda.cwiseAbs().maxCoeff();
    const double cutoff = rel_cutoff * smax;

    PseudoInverse out;
    out.pinv = Matrix::Zero(k, k);
    out.projection = Matrix::Zero(k, k);
    if (smax == 0.0) {
        return out;
    }
    for (Index i = 0; i < k; ++i) {
        if (std::abs(lambda[i]) > cutoff) {
            const Vector v = eig.eigenvectors().col(i);
            out.pinv.noalias() += v * v.transpose() / lambda[i];
            out.projection.noalias() += v * v.transpose();
            ++out.rank;
        }
    }
    return out;
}

double orthonormality_defect(const Matrix& m) {
    const Matrix gram = m.transpose() * m;
    return (gram - Matrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff();
}

bool is_orthonormal(const Matrix& m, double tol) {
    return orthonormality_defect(m) < tol;
}

Matrix orthonormal_columns(const Matrix& m) {
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
    const Matrix r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    for (Index c = 0; c < m.cols(); ++c) {
        if (r(c, c) < 0.0) {
            q.col(c) = -q.col(c);
        }
    }
    return q;
}

}  // namespace cssdr
