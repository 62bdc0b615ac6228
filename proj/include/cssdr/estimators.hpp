#pragma once

#include "cssdr/dataset.hpp"
#include "cssdr/kernels.hpp"
#include "cssdr/rotations.hpp"

namespace cssdr {

/// Candidate matrix A = Sigma^-1 M Sigma^-1 whose column space estimates the
/// inverse-regression span. The kernel-moment matrix M and Sigma_hat are
/// kept alongside A so the span can be extracted at the standardized scale.
struct CandidateMatrix {
    Matrix A;
    Matrix middle;  // M, the conditional-moment outer product
    Matrix sigma;   // Sigma_hat; empty means identity
    GKernel kernel;
};

struct ClassicalFit {
    Matrix beta;           // p x d, orthonormal columns
    Vector eigenvalues;    // all p, descending
    bool tied_at_cut = false;  // lambda_d == lambda_{d+1} within tolerance
};

/// Candidate matrix of the given kernel on centered data.
///
/// OLS uses the moment vector En[y X]; SIR uses slice proportions and slice
/// means; KIR and PIR average the conditional moment vectors
/// v_j = En[X g(Y, y_j)] over j, with PIR factorized through the
/// s-dimensional response basis.
CandidateMatrix candidate_matrix(const Dataset& ds, const GKernel& g);

/// Generic kernel-matrix route: Sigma^-1 [ (1/n) sum_j v_j v_j^T ] Sigma^-1
/// with v_j = (1/n) X^T gmat(:, j). Used by KIR and as an independent path
/// for cross-checking the slice-based SIR computation.
Matrix candidate_from_kernel_matrix(const Dataset& ds, const Matrix& gmat);

/// Leading d-dimensional span of the candidate matrix, eigenvalues
/// descending. Extraction runs at the standardized predictor scale: the
/// eigenvectors of Sigma^-1/2 M Sigma^-1/2 are mapped back through
/// Sigma^-1/2 and re-orthonormalized (the usual inverse-regression
/// eigenproblem M v = lambda Sigma v). With sigma empty (or identity) this
/// reduces to the plain symmetric eigendecomposition of A.
ClassicalFit leading_span(const CandidateMatrix& cm, int d);

ClassicalFit classical_fit(const Dataset& ds, const GKernel& g, int d);

/// Angles phi with span(frame(phi)) = span(beta), found by zeroing the
/// below-pivot entries of beta with plane rotations in product order.
/// Requires orthonormal columns.
AngleVector frame_to_angles(const Matrix& beta);

}  // namespace cssdr
