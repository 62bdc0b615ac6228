#include "cssdr/css_objective.hpp"

#include "cssdr/linalg.hpp"
#include "cssdr/rng.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cssdr {

namespace {

void enumerate_terms(int d, int degree, int coord, std::vector<int>& current, int remaining,
                     std::vector<std::vector<int>>& out) {
    if (coord == d) {
        out.push_back(current);
        return;
    }
    // Leading coordinates take the higher exponents first, so the order runs
    // 1, u1, u2, ..., u1^2, u1 u2, u2^2, ...
    for (int q = remaining; q >= 0; --q) {
        current[static_cast<std::size_t>(coord)] = q;
        enumerate_terms(d, degree, coord + 1, current, remaining - q, out);
    }
    current[static_cast<std::size_t>(coord)] = 0;
}

Matrix feature_gram_inverse(const Matrix& feats, double ridge_scale, double n) {
    const Matrix gram = feats.transpose() * feats / n;
    return sym_inverse(gram, ridge_scale, "feature Gram");
}

}  // namespace

GBasis GBasis::full(int d, int degree) {
    if (d < 1 || degree < 0) {
        throw std::invalid_argument("basis needs d >= 1 and degree >= 0");
    }
    GBasis gb;
    gb.d = d;
    gb.degree = degree;
    std::vector<std::vector<int>> by_degree;
    std::vector<int> current(static_cast<std::size_t>(d), 0);
    for (int total = 0; total <= degree; ++total) {
        std::vector<std::vector<int>> level;
        enumerate_terms(d, degree, 0, current, total, level);
        for (auto& term : level) {
            int sum = 0;
            for (int e : term) sum += e;
            if (sum == total) {
                gb.terms.push_back(std::move(term));
            }
        }
    }
    return gb;
}

GBasis GBasis::pure_powers(int d, int degree) {
    if (d < 1 || degree < 0) {
        throw std::invalid_argument("basis needs d >= 1 and degree >= 0");
    }
    // Full family through degree 2, single-coordinate powers beyond: the
    // mixed monomials above the quadratic level are dropped.
    GBasis gb = GBasis::full(d, std::min(degree, 2));
    gb.degree = degree;
    for (int q = 3; q <= degree; ++q) {
        for (int c = 0; c < d; ++c) {
            std::vector<int> term(static_cast<std::size_t>(d), 0);
            term[static_cast<std::size_t>(c)] = q;
            gb.terms.push_back(std::move(term));
        }
    }
    return gb;
}

Matrix poly_features(const Matrix& u, const GBasis& gb) {
    if (u.cols() != gb.d) {
        throw std::invalid_argument("reduced data has " + std::to_string(u.cols()) +
                                    " columns, basis expects " + std::to_string(gb.d));
    }
    const Index n = u.rows();
    Matrix feats(n, gb.size());
    for (int t = 0; t < gb.size(); ++t) {
        feats.col(t).setOnes();
        const auto& term = gb.terms[static_cast<std::size_t>(t)];
        for (int c = 0; c < gb.d; ++c) {
            for (int q = 0; q < term[static_cast<std::size_t>(c)]; ++q) {
                feats.col(t) = feats.col(t).cwiseProduct(u.col(c));
            }
        }
    }
    return feats;
}

Matrix poly_features_directional(const Matrix& u, const GBasis& gb, const Matrix& w) {
    if (w.rows() != u.rows() || w.cols() != u.cols()) {
        throw std::invalid_argument("direction matrix must match reduced data shape");
    }
    const Index n = u.rows();
    Matrix out = Matrix::Zero(n, gb.size());
    for (int t = 0; t < gb.size(); ++t) {
        const auto& term = gb.terms[static_cast<std::size_t>(t)];
        for (int c = 0; c < gb.d; ++c) {
            const int e = term[static_cast<std::size_t>(c)];
            if (e == 0) continue;
            Vector partial = Vector::Ones(n) * static_cast<double>(e);
            for (int cc = 0; cc < gb.d; ++cc) {
                const int power = cc == c ? term[static_cast<std::size_t>(cc)] - 1
                                          : term[static_cast<std::size_t>(cc)];
                for (int q = 0; q < power; ++q) {
                    partial = partial.cwiseProduct(u.col(cc));
                }
            }
            out.col(t) += partial.cwiseProduct(w.col(c));
        }
    }
    return out;
}

Matrix fitted_mean(const Matrix& eta, const Dataset& ds, const GBasis& gb, double ridge_scale) {
    const auto n = static_cast<double>(ds.n());
    const Matrix u = ds.X * eta;
    const Matrix feats = poly_features(u, gb);
    const Matrix gram_inv = feature_gram_inverse(feats, ridge_scale, n);
    const Matrix cross = ds.X.transpose() * feats / n;  // p x k = En[X G^T]
    return feats * (gram_inv * cross.transpose());
}

CssObjective::CssObjective(Dataset centered, GKernel kernel, GBasis basis, double ridge_scale)
    : data_(std::move(centered)),
      kernel_(std::move(kernel)),
      basis_(std::move(basis)),
      ridge_scale_(ridge_scale) {
    const auto n = static_cast<double>(data_.n());
    switch (kernel_.family) {
        case KernelFamily::ols:
            y_squared_ = data_.y.cwiseProduct(data_.y);
            break;
        case KernelFamily::sir:
            slices_ = make_slices(data_.y, kernel_.slices);
            break;
        case KernelFamily::kir:
            kernel_matrix_ = kernel_matrix(kernel_, data_.y);
            break;
        case KernelFamily::pir: {
            h_matrix_ = kernel_.hbasis.eval_all(data_.y);
            const Matrix r5 = h_matrix_.transpose() * h_matrix_ / n;
            const Matrix m = sym_inverse(r5, 1e-10, "response basis Gram");
            weight_core_ = m * r5 * m;
            break;
        }
    }
}

double CssObjective::operator()(const AngleVector& phi) const {
    const auto n = static_cast<double>(data_.n());
    const Matrix eta = frame(phi);
    const Matrix residual = data_.X - fitted_mean(eta, data_, basis_, ridge_scale_);

    switch (kernel_.family) {
        case KernelFamily::ols:
            // En || r_i * y_i ||^2
            return residual.rowwise().squaredNorm().dot(y_squared_) / n;
        case KernelFamily::sir: {
            // (1/n) sum_l p_l || slice mean of r ||^2
            Matrix sums = Matrix::Zero(data_.p(), slices_.k);
            for (Index i = 0; i < data_.n(); ++i) {
                sums.col(slices_.assignment[static_cast<std::size_t>(i)]) +=
                    residual.row(i).transpose();
            }
            double total = 0.0;
            for (int s = 0; s < slices_.k; ++s) {
                const double count = slices_.counts[static_cast<std::size_t>(s)];
                total += (count / n) * (sums.col(s) / count).squaredNorm();
            }
            return total / n;
        }
        case KernelFamily::kir: {
            // (1/n) sum_j || (1/n) sum_i r_i g(y_i, y_j) ||^2
            const Matrix v = residual.transpose() * kernel_matrix_ / n;
            return v.squaredNorm() / n;
        }
        case KernelFamily::pir: {
            // Factorized through the response basis: tr(T M R5 M T^T) with
            // T = En[r H^T], identical to the double sum.
            const Matrix t = residual.transpose() * h_matrix_ / n;  // p x s
            return (t * weight_core_).cwiseProduct(t).sum();
        }
    }
    throw std::logic_error("unreachable kernel family");
}

FitReport fit_css(const Dataset& ds, const GKernel& kernel, int d, const FitOptions& opts) {
    const auto p = static_cast<int>(ds.p());
    if (d < 1 || d > p) {
        throw std::invalid_argument("fit dimension d=" + std::to_string(d) +
                                    " out of range for p=" + std::to_string(p));
    }
    const Dataset centered = ds.centered ? ds : center(ds);
    const GBasis basis = opts.basis.terms.empty() ? GBasis::full(d, 2) : opts.basis;
    if (basis.d != d) {
        throw std::invalid_argument("basis dimension does not match fit dimension");
    }

    FitReport report;
    if (d == p) {
        // Every frame spans R^p; nothing to optimize.
        report.beta = Matrix::Identity(p, p);
        report.phi = AngleVector(Vector::Zero(angle_count(p, d)), p, d);
        const CssObjective objective(centered, kernel, basis, opts.ridge_scale);
        report.objective_initial = report.objective_final = objective(report.phi);
        report.converged = true;
        report.warnings.emplace_back("d equals p: identity span returned without optimization");
        return report;
    }

    const ClassicalFit init = classical_fit(centered, kernel, d);
    report.classical_beta = init.beta;
    report.classical_eigenvalues = init.eigenvalues;
    if (init.tied_at_cut) {
        report.warnings.emplace_back("eigenvalues tied at the span cut; classical span not unique");
    }
    const AngleVector phi0 = frame_to_angles(init.beta);

    const CssObjective objective(centered, kernel, basis, opts.ridge_scale);
    report.objective_initial = objective(phi0);

    std::vector<AngleVector> inits{phi0};
    Rng rng(opts.seed);
    for (int r = 1; r < opts.restarts; ++r) {
        Vector jittered = phi0.phi;
        for (Index i = 0; i < jittered.size(); ++i) {
            jittered[i] += opts.jitter * rng.normal();
        }
        inits.emplace_back(jittered, phi0.p, phi0.d);
    }

    OptimResult opt = multistart([&objective](const AngleVector& a) { return objective(a); },
                                 inits, opts.optim);

    if (opt.value > report.objective_initial) {
        // Cannot happen with a monotone simplex step from phi0; guard anyway.
        opt.phi = phi0;
        opt.value = report.objective_initial;
        report.warnings.emplace_back("optimizer failed to improve on the classical start");
    }
    if (!opt.converged) {
        report.warnings.emplace_back("optimizer stopped at the iteration limit before converging");
    }

    report.phi = opt.phi;
    report.beta = frame(opt.phi);
    report.objective_final = opt.value;
    report.trace = std::move(opt.trace);
    report.converged = opt.converged;
    report.iterations = opt.iterations;
    report.evaluations = opt.evaluations;
    return report;
}

}  // namespace cssdr
