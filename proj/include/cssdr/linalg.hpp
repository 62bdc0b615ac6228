#pragma once

#include "cssdr/types.hpp"

namespace cssdr {

/// Inverse of a symmetric positive (semi)definite matrix via eigendecomposition.
///
/// If the condition number exceeds 1e12, a ridge of `ridge_scale * trace / k`
/// is added to every eigenvalue before inverting (equivalent to S + ridge*I).
/// Throws NumericError when the matrix cannot be salvaged (non-finite entries,
/// nonpositive trace). `what` names the matrix in error messages.
Matrix sym_inverse(const Matrix& s, double ridge_scale, const char* what);

/// Strict inverse of a symmetric positive definite matrix; throws
/// NumericError when the condition number exceeds 1e12.
Matrix sym_inverse_strict(const Matrix& s, const char* what);

struct PseudoInverse {
    Matrix pinv;        // Moore-Penrose inverse
    Matrix projection;  // projection onto the retained column space
    int rank = 0;
};

/// Moore-Penrose inverse of a symmetric PSD matrix. Eigenvalues below
/// rel_cutoff * lambda_max are treated as exact zeros.
PseudoInverse sym_pseudo_inverse(const Matrix& s, double rel_cutoff);

/// Max |m_ij - (i==j)| over the Gram of the columns.
double orthonormality_defect(const Matrix& m);

bool is_orthonormal(const Matrix& m, double tol = 1e-8);

/// Orthonormalize columns (thin QR with sign fixed so the diagonal of R
/// is nonnegative, keeping the map deterministic).
Matrix orthonormal_columns(const Matrix& m);

}  // namespace cssdr
