#pragma once

#include "cssdr/types.hpp"

#include <string>
#include <vector>

namespace cssdr {

/// Regression sample: n x p predictor matrix and n-vector response.
///
/// Immutable by convention: the transformation helpers below return new
/// datasets. shift_x/shift_y/scale_x record the accumulated affine map from
/// original to current coordinates (x_cur = (x_orig - shift_x) / scale_x), so
/// fitted bases can be reported in original coordinates.
struct Dataset {
    Matrix X;
    Vector y;
    std::vector<std::string> predictor_names;
    std::string response_name;
    bool centered = false;
    bool standardized = false;
    Vector shift_x;
    double shift_y = 0.0;
    Vector scale_x;

    Index n() const { return X.rows(); }
    Index p() const { return X.cols(); }
};

/// Covariance of the predictors with divisor n. chol_ok records whether a
/// Cholesky factorization succeeded (i.e. the matrix is numerically PD).
struct CovMatrix {
    Matrix sigma;
    bool chol_ok = false;
};

/// Validates shapes and finiteness (n >= 2, p >= 1) and fills in the
/// identity transform record.
Dataset make_dataset(Matrix X, Vector y);

/// Load a comma-separated file with a mandatory header row. `response`
/// selects the response column by exact name, or, failing that, by 0-based
/// column index if it parses as a nonnegative integer. Every column must be
/// numeric ('.' decimal, no missing cells).
Dataset load_csv(const std::string& path, const std::string& response);

/// Subtract column means from X and the mean from y. Idempotent.
Dataset center(const Dataset& ds);

/// Sigma_hat = (1/n) sum_i (X_i - X_bar)(X_i - X_bar)^T.
CovMatrix covariance(const Dataset& ds);

/// Center, then scale every predictor column to unit variance (divisor n).
/// Throws NumericError on a zero-variance column.
Dataset standardize(const Dataset& ds);

/// Map the columns of a basis fitted in `ds` coordinates back to original
/// predictor coordinates and re-orthonormalize.
Matrix to_original_coords(const Dataset& ds, const Matrix& beta);

}  // namespace cssdr
