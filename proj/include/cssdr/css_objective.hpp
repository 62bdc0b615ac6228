#pragma once

#include "cssdr/dataset.hpp"
#include "cssdr/estimators.hpp"
#include "cssdr/kernels.hpp"
#include "cssdr/nelder_mead.hpp"
#include "cssdr/rotations.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cssdr {

/// Monomial basis over the d reduced coordinates, used to model the
/// conditional mean E(X | eta^T X). Terms are multi-indices (exponent per
/// coordinate); the first term is always the constant.
struct GBasis {
    int d = 1;
    int degree = 2;
    std::vector<std::vector<int>> terms;

    /// All monomials of total degree <= degree.
    static GBasis full(int d, int degree);

    /// Full family through degree 2 plus per-coordinate pure powers above
    /// (no mixed monomials beyond the quadratic level).
    static GBasis pure_powers(int d, int degree);

    int size() const { return static_cast<int>(terms.size()); }
};

/// n x k matrix whose column t evaluates term t of the basis row-wise over
/// the reduced data u (n x d). Column 0 is all ones.
Matrix poly_features(const Matrix& u, const GBasis& gb);

/// Directional derivative of the features along w (n x d):
/// row i is sum_c w_ic * dG/du_c evaluated at u_i.
Matrix poly_features_directional(const Matrix& u, const GBasis& gb, const Matrix& w);

/// Fitted conditional mean: least-squares projection of the predictor
/// columns onto the feature columns of eta^T X. Returns n x p.
Matrix fitted_mean(const Matrix& eta, const Dataset& ds, const GBasis& gb,
                   double ridge_scale = 1e-8);

/// Evaluation context for the sample objective L_n(eta(phi)). Everything
/// that does not depend on phi (kernel matrix, response-basis factors, slice
/// assignment) is computed once at construction.
class CssObjective {
public:
    CssObjective(Dataset centered, GKernel kernel, GBasis basis, double ridge_scale = 1e-8);

    double operator()(const AngleVector& phi) const;

    const Dataset& data() const { return data_; }
    const GKernel& kernel() const { return kernel_; }
    const GBasis& basis() const { return basis_; }

private:
    Dataset data_;
    GKernel kernel_;
    GBasis basis_;
    double ridge_scale_;

    Matrix kernel_matrix_;   // kir: n x n
    Matrix h_matrix_;        // pir: n x s
    Matrix weight_core_;     // pir: M * R5 * M with M the Gram inverse
    SlicePartition slices_;  // sir
    Vector y_squared_;       // ols
};

struct FitOptions {
    GBasis basis;               // empty terms -> full(d, 2) chosen at fit time
    OptimOptions optim;
    int restarts = 1;
    double jitter = 0.5;
    std::uint64_t seed = 42;
    double ridge_scale = 1e-8;
};

struct FitReport {
    Matrix beta;            // frame in fitting coordinates
    AngleVector phi;
    double objective_initial = 0.0;
    double objective_final = 0.0;
    std::vector<double> trace;
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
    Matrix classical_beta;
    Vector classical_eigenvalues;
    std::vector<std::string> warnings;
};

/// CSS fit: initialize at the classical estimator of the same kernel,
/// minimize L_n over the rotation angles, and report the improved frame.
/// The final objective never exceeds the initial one. Data is centered on
/// entry if it is not already.
FitReport fit_css(const Dataset& ds, const GKernel& kernel, int d, const FitOptions& opts = {});

}  // namespace cssdr
