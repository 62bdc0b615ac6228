#include "cssdr/asymptotics.hpp"

#include "cssdr/linalg.hpp"

#include <string>
#include <vector>

namespace cssdr {

namespace {

void require_constant(const HBasis& hb, const GBasis& gb) {
    if (hb.size() < 1) {
        throw std::invalid_argument("response basis is empty");
    }
    bool has_const = false;
    for (const auto& term : gb.terms) {
        bool all_zero = true;
        for (int e : term) {
            if (e != 0) all_zero = false;
        }
        if (all_zero) has_const = true;
    }
    if (!has_const) {
        throw std::invalid_argument("feature basis must contain the constant term");
    }
}

// Shared per-frame quantities for the moment machinery.
struct Workspace {
    Matrix eta;      // p x d
    Matrix u;        // n x d
    Matrix hm;       // n x s
    Matrix gm;       // n x k
    GramBundle bundle;
};

Workspace build_workspace(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                          const GBasis& gb) {
    require_constant(hb, gb);
    const auto n = static_cast<double>(ds.n());
    Workspace ws;
    ws.eta = frame(phi);
    ws.u = ds.X * ws.eta;
    ws.hm = hb.eval_all(ds.y);
    ws.gm = poly_features(ws.u, gb);

    GramBundle& b = ws.bundle;
    b.r1 = ds.X.transpose() * ws.hm / n;
    b.r2 = ds.X.transpose() * ws.gm / n;
    b.r3 = ws.gm.transpose() * ws.gm / n;
    b.r4 = ws.gm.transpose() * ws.hm / n;
    b.r5 = ws.hm.transpose() * ws.hm / n;
    b.r3_inv = sym_inverse(b.r3, 1e-8, "feature Gram");
    b.r5_inv = sym_inverse(b.r5, 1e-10, "response basis Gram");
    b.r = b.r1 - b.r2 * b.r3_inv * b.r4;
    b.objective = (b.r * b.r5_inv).cwiseProduct(b.r).sum();
    return ws;
}

RPartials partials_from_workspace(const Workspace& ws, const AngleVector& phi, const Dataset& ds,
                                  const GBasis& gb, int t) {
    const auto n = static_cast<double>(ds.n());
    const Matrix eta_dot = frame_derivative(phi, t);
    const Matrix w = ds.X * eta_dot;  // n x d, rows eta_dot^T X_i
    const Matrix s = poly_features_directional(ws.u, gb, w);  // n x k

    RPartials out;
    out.dr2 = ds.X.transpose() * s / n;
    out.dr3 = (s.transpose() * ws.gm + ws.gm.transpose() * s) / n;
    out.dr4 = s.transpose() * ws.hm / n;
    const GramBundle& b = ws.bundle;
    out.dr = -out.dr2 * b.r3_inv * b.r4 + b.r2 * b.r3_inv * out.dr3 * b.r3_inv * b.r4 -
             b.r2 * b.r3_inv * out.dr4;
    return out;
}

}  // namespace

GramBundle gram_bundle(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                       const GBasis& gb) {
    return build_workspace(phi, ds, hb, gb).bundle;
}

double basis_objective(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                       const GBasis& gb) {
    return build_workspace(phi, ds, hb, gb).bundle.objective;
}

RPartials r_partials(const AngleVector& phi, const Dataset& ds, const HBasis& hb, const GBasis& gb,
                     int t) {
    const Workspace ws = build_workspace(phi, ds, hb, gb);
    return partials_from_workspace(ws, phi, ds, gb, t);
}

HessianBundle hessian_bundle(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                             const GBasis& gb) {
    const Workspace ws = build_workspace(phi, ds, hb, gb);
    const int m = phi.m();

    std::vector<Matrix> dr(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t) {
        dr[static_cast<std::size_t>(t)] = partials_from_workspace(ws, phi, ds, gb, t).dr;
    }

    HessianBundle out;
    out.w = Matrix::Zero(m, m);
    std::vector<Matrix> q(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t) {
        q[static_cast<std::size_t>(t)] = dr[static_cast<std::size_t>(t)] * ws.bundle.r5_inv;
    }
    for (int t = 0; t < m; ++t) {
        for (int u = t; u < m; ++u) {
            const double value =
                2.0 * q[static_cast<std::size_t>(t)].cwiseProduct(dr[static_cast<std::size_t>(u)]).sum();
            out.w(t, u) = value;
            out.w(u, t) = value;
        }
    }
    const PseudoInverse pinv = sym_pseudo_inverse(out.w, 1e-8);
    out.w_pinv = pinv.pinv;
    out.projection = pinv.projection;
    out.rank = pinv.rank;
    out.residual_norm = ws.bundle.r.norm();
    return out;
}

Matrix influence_matrix(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                        const GBasis& gb) {
    const Workspace ws = build_workspace(phi, ds, hb, gb);
    const GramBundle& b = ws.bundle;
    const int m = phi.m();
    const Index n = ds.n();

    std::vector<Matrix> q(static_cast<std::size_t>(m));  // (dR_t) R5^-1, p x s
    for (int t = 0; t < m; ++t) {
        q[static_cast<std::size_t>(t)] =
            partials_from_workspace(ws, phi, ds, gb, t).dr * b.r5_inv;
    }

    const Matrix a34 = b.r3_inv * b.r4;  // k x s
    const Matrix b23 = b.r2 * b.r3_inv;  // p x k

    Matrix out(n, m);
    for (Index i = 0; i < n; ++i) {
        const Vector xi = ds.X.row(i).transpose();
        const Vector gi = ws.gm.row(i).transpose();
        const Vector hi = ws.hm.row(i).transpose();

        const Matrix r1_star = xi * hi.transpose() - b.r1;
        const Matrix r2_star = xi * gi.transpose() - b.r2;
        const Matrix r3_star = gi * gi.transpose() - b.r3;
        const Matrix r4_star = gi * hi.transpose() - b.r4;

        // Product rule on R1 - R2 R3^-1 R4.
        const Matrix r_star =
            r1_star - r2_star * a34 + b23 * r3_star * a34 - b23 * r4_star;
        for (int t = 0; t < m; ++t) {
            out(i, t) = 2.0 * q[static_cast<std::size_t>(t)].cwiseProduct(r_star).sum();
        }
    }
    return out;
}

Vector influence_vector(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                        const GBasis& gb, Index row) {
    if (row < 0 || row >= ds.n()) {
        throw std::invalid_argument("influence row " + std::to_string(row) + " out of range");
    }
    return influence_matrix(phi, ds, hb, gb).row(row).transpose();
}

CovarianceEstimate angle_covariance(const AngleVector& phi, const Dataset& ds, const HBasis& hb,
                                    const GBasis& gb) {
    const HessianBundle hess = hessian_bundle(phi, ds, hb, gb);
    const Matrix gstar = influence_matrix(phi, ds, hb, gb);
    const auto n = static_cast<double>(ds.n());
    const Matrix second_moment = gstar.transpose() * gstar / n;

    CovarianceEstimate out;
    out.lambda = hess.w_pinv * second_moment * hess.w_pinv;
    out.lambda = 0.5 * (out.lambda + out.lambda.transpose());
    out.per_angle_se = (out.lambda.diagonal() / n).cwiseMax(0.0).cwiseSqrt();
    return out;
}

}  // namespace cssdr
