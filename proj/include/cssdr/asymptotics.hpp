#pragma once

#include "cssdr/css_objective.hpp"
#include "cssdr/dataset.hpp"
#include "cssdr/kernels.hpp"
#include "cssdr/rotations.hpp"

namespace cssdr {

/// Sample moment matrices of the basis-kernel objective at a given frame.
/// With H the response basis (n x s) and G the reduced-coordinate features
/// (n x k):
///   r1 = En[X H^T], r2 = En[X G^T], r3 = En[G G^T], r4 = En[G H^T],
///   r5 = En[H H^T], r = r1 - r2 r3^-1 r4.
/// The objective value tr(r r5^-1 r^T) is attached.
struct GramBundle {
    Matrix r1, r2, r3, r4, r5;
    Matrix r3_inv, r5_inv;
    Matrix r;
    double objective = 0.0;
};

/// Derivatives of the moment matrices in one angle coordinate.
struct RPartials {
    Matrix dr2, dr3, dr4;  // primitive moment derivatives
    Matrix dr;             // assembled d r / d phi_t
};

struct HessianBundle {
    Matrix w;           // m x m, symmetric PSD
    Matrix w_pinv;      // Moore-Penrose inverse
    Matrix projection;  // P_W = W^+ W onto the identified directions
    int rank = 0;
    double residual_norm = 0.0;  // ||r||_F diagnostic; the expansion assumes r ~ 0
};

struct CovarianceEstimate {
    Matrix lambda;       // m x m plug-in covariance of the projected angles
    Vector per_angle_se; // sqrt(diag(lambda) / n)
};

/// Both bases must contain the constant term; the data need not be centered.
GramBundle gram_bundle(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                       const GBasis& gb);

/// Objective tr(R R5^-1 R^T) as a function of the angles.
double basis_objective(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                       const GBasis& gb);

/// Analytic derivative of the moment matrices in angle t; dr matches central
/// finite differences of gram_bundle(...).r.
RPartials r_partials(const AngleVector& phi, const Dataset& ds, const HBasis& hb, const GBasis& gb,
                     int t);

/// W_tu = 2 tr[(dR_t) R5^-1 (dR_u)^T] with pseudo-inverse cutoff
/// 1e-8 * sigma_max. Rank deficiency is expected (the angle
/// parameterization has exact zero modes) and is not an error.
HessianBundle hessian_bundle(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                             const GBasis& gb);

/// Influence vector of observation `row`: g*_t = 2 tr[(dR_t) R5^-1 (R*)^T]
/// with R* assembled by the product rule from the per-observation moment
/// deviations.
Vector influence_vector(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                        const GBasis& gb, Index row);

/// All influence vectors, one row per observation (n x m).
Matrix influence_matrix(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                        const GBasis& gb);

/// Plug-in sandwich: Lambda = W^+ En[g* g*^T] W^+ and the per-angle
/// standard errors sqrt(diag(Lambda)/n).
CovarianceEstimate angle_covariance(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                                    const GBasis& gb);

}  // namespace cssdr
