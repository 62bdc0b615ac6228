#include "cssdr/estimators.hpp"

#include "cssdr/linalg.hpp"

#include <cmath>
#include <string>

namespace cssdr {

namespace {

Matrix inverse_sqrt(const Matrix& sigma, const char* what) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    if (eig.info() != Eigen::Success) {
        throw NumericError(std::string(what) + ": eigendecomposition failed");
    }
    const Vector lambda = eig.eigenvalues();
    if (!(lambda.maxCoeff() > 0.0) || lambda.minCoeff() <= 1e-12 * lambda.maxCoeff()) {
        throw NumericError(std::string(what) + ": singular (condition number above 1e12)");
    }
    return eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

}  // namespace

CandidateMatrix candidate_matrix(const Dataset& ds, const GKernel& g) {
    const auto n = static_cast<double>(ds.n());
    const Matrix sigma = covariance(ds).sigma;
    const Matrix sigma_inv = sym_inverse_strict(sigma, "predictor covariance");
    Matrix middle;

    switch (g.family) {
        case KernelFamily::ols: {
            const Vector v = ds.X.transpose() * ds.y / n;
            middle = v * v.transpose();
            break;
        }
        case KernelFamily::sir: {
            const SlicePartition part = make_slices(ds.y, g.slices);
            middle = Matrix::Zero(ds.p(), ds.p());
            Matrix means = Matrix::Zero(ds.p(), part.k);
            for (Index i = 0; i < ds.n(); ++i) {
                means.col(part.assignment[static_cast<std::size_t>(i)]) += ds.X.row(i).transpose();
            }
            for (int s = 0; s < part.k; ++s) {
                const double count = part.counts[static_cast<std::size_t>(s)];
                means.col(s) /= count;
                middle.noalias() += (count / n) * means.col(s) * means.col(s).transpose();
            }
            break;
        }
        case KernelFamily::kir: {
            const Matrix gmat = kernel_matrix(g, ds.y);
            const Matrix v = ds.X.transpose() * gmat / n;  // p x n, columns v_j
            middle = v * v.transpose() / n;
            break;
        }
        case KernelFamily::pir: {
            // v_j = R1 * Gram^-1 * H(y_j); averaging v_j v_j^T over j
            // collapses to R1 M R5 M R1^T with M the (possibly ridged)
            // Gram inverse.
            const Matrix hm = g.hbasis.eval_all(ds.y);
            const Matrix r5 = hm.transpose() * hm / n;
            const Matrix m = sym_inverse(r5, 1e-10, "response basis Gram");
            const Matrix r1 = ds.X.transpose() * hm / n;  // p x s
            middle = r1 * m * r5 * m * r1.transpose();
            break;
        }
    }

    CandidateMatrix cm;
    cm.kernel = g;
    cm.middle = 0.5 * (middle + middle.transpose());
    cm.sigma = sigma;
    cm.A = sigma_inv * cm.middle * sigma_inv;
    cm.A = 0.5 * (cm.A + cm.A.transpose());
    return cm;
}

Matrix candidate_from_kernel_matrix(const Dataset& ds, const Matrix& gmat) {
    const auto n = static_cast<double>(ds.n());
    const Matrix sigma_inv =
        sym_inverse_strict(covariance(ds).sigma, "predictor covariance");
    const Matrix v = ds.X.transpose() * gmat / n;
    Matrix a = sigma_inv * (v * v.transpose() / n) * sigma_inv;
    return 0.5 * (a + a.transpose());
}

ClassicalFit leading_span(const CandidateMatrix& cm, int d) {
    const Index p = cm.A.rows();
    if (d < 1 || d > p) {
        throw std::invalid_argument("leading span dimension " + std::to_string(d) +
                                    " out of range for p=" + std::to_string(p));
    }
    const bool have_scale = cm.sigma.size() > 0 && cm.middle.size() > 0;
    Matrix target;
    Matrix back_map;
    if (have_scale) {
        back_map = inverse_sqrt(cm.sigma, "predictor covariance");
        target = back_map * cm.middle * back_map;
    } else {
        target = cm.A;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (target + target.transpose()));
    if (eig.info() != Eigen::Success) {
        throw NumericError("candidate matrix eigendecomposition failed");
    }
    ClassicalFit fit;
    fit.eigenvalues = eig.eigenvalues().reverse();
    Matrix top(p, d);
    for (int c = 0; c < d; ++c) {
        top.col(c) = eig.eigenvectors().col(p - 1 - c);
    }
    fit.beta = orthonormal_columns(have_scale ? Matrix(back_map * top) : top);
    if (d < p) {
        const double scale = std::abs(fit.eigenvalues[0]) + 1e-300;
        fit.tied_at_cut = std::abs(fit.eigenvalues[d - 1] - fit.eigenvalues[d]) <= 1e-12 * scale;
    }
    return fit;
}

ClassicalFit classical_fit(const Dataset& ds, const GKernel& g, int d) {
    return leading_span(candidate_matrix(ds, g), d);
}

AngleVector frame_to_angles(const Matrix& beta) {
    const auto p = static_cast<int>(beta.rows());
    const auto d = static_cast<int>(beta.cols());
    if (!is_orthonormal(beta)) {
        throw std::invalid_argument("frame_to_angles requires orthonormal columns (defect " +
                                    std::to_string(orthonormality_defect(beta)) + ")");
    }
    const int m = angle_count(p, d);
    Vector phi(m);
    Matrix work = beta;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const int t = pair_to_index(i, j, p, d);
            const double angle = std::atan2(work(j, i), work(i, i));
            phi[t] = angle;
            // Apply the inverse rotation so entry (j, i) becomes zero.
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            for (int col = 0; col < d; ++col) {
                const double a = work(i, col);
                const double b = work(j, col);
                work(i, col) = c * a + s * b;
                work(j, col) = -s * a + c * b;
            }
        }
    }
    return wrap_angles(AngleVector(std::move(phi), p, d));
}

}  // namespace cssdr
