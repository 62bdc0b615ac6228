#include "cssdr/kernels.hpp"

#include "cssdr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cssdr {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684;

inline double normal_density(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

}  // namespace

Vector HBasis::eval(double y) const {
    Vector h(size());
    double power = 1.0;
    for (int q = 0; q <= degree; ++q) {
        h[q] = power;
        power *= y;
    }
    return h;
}

Matrix HBasis::eval_all(const Vector& y) const {
    Matrix h(y.size(), size());
    h.col(0).setOnes();
    for (int q = 1; q <= degree; ++q) {
        h.col(q) = h.col(q - 1).cwiseProduct(y);
    }
    return h;
}

const char* family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::ols: return "ols";
        case KernelFamily::sir: return "sir";
        case KernelFamily::kir: return "kir";
        case KernelFamily::pir: return "pir";
    }
    return "?";
}

SlicePartition make_slices(const Vector& y, int k) {
    const auto n = static_cast<int>(y.size());
    if (k < 2) {
        throw std::invalid_argument("slice count must be at least 2, got " + std::to_string(k));
    }
    if (k > n) {
        throw std::invalid_argument("slice count " + std::to_string(k) + " exceeds sample size " +
                                    std::to_string(n));
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&y](int a, int b) { return y[a] < y[b]; });

    SlicePartition part;
    part.k = k;
    part.assignment.assign(static_cast<std::size_t>(n), 0);
    part.counts.assign(static_cast<std::size_t>(k), 0);
    const int base = n / k;
    const int extra = n % k;  // first `extra` slices get one more
    int pos = 0;
    for (int s = 0; s < k; ++s) {
        const int size = base + (s < extra ? 1 : 0);
        if (s > 0) {
            part.boundaries.push_back(y[order[static_cast<std::size_t>(pos)]]);
        }
        for (int i = 0; i < size; ++i, ++pos) {
            part.assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = s;
        }
        part.counts[static_cast<std::size_t>(s)] = size;
    }
    return part;
}

double smoothing_weight(double yi, double yj, double h, const Vector& y_sample) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("bandwidth must be positive, got " + std::to_string(h));
    }
    const auto n = static_cast<double>(y_sample.size());
    double denom = 0.0;
    for (Index l = 0; l < y_sample.size(); ++l) {
        denom += normal_density(std::abs(y_sample[l] - yj) / h);
    }
    denom /= n;
    if (!(denom > 0.0)) {
        throw NumericError("smoothing weight denominator underflow at bandwidth " +
                           std::to_string(h) + " (conditioning point too isolated)");
    }
    return normal_density(std::abs(yi - yj) / h) / denom;
}

double basis_weight(double yi, double yj, const HBasis& hb, const Vector& y_sample) {
    const Matrix hm = hb.eval_all(y_sample);
    const Matrix gram = hm.transpose() * hm / static_cast<double>(y_sample.size());
    const Matrix inv = sym_inverse(gram, 1e-10, "response basis Gram");
    return hb.eval(yi).dot(inv * hb.eval(yj));
}

Matrix kernel_matrix(const GKernel& g, const Vector& y) {
    const Index n = y.size();
    const auto nd = static_cast<double>(n);
    Matrix gm(n, n);
    switch (g.family) {
        case KernelFamily::ols:
            // g(y, y~) = y, constant in the conditioning argument.
            for (Index j = 0; j < n; ++j) {
                gm.col(j) = y;
            }
            break;
        case KernelFamily::sir: {
            const SlicePartition part = make_slices(y, g.slices);
            for (Index j = 0; j < n; ++j) {
                const int sj = part.assignment[static_cast<std::size_t>(j)];
                const double w = nd / part.counts[static_cast<std::size_t>(sj)];
                for (Index i = 0; i < n; ++i) {
                    gm(i, j) = part.assignment[static_cast<std::size_t>(i)] == sj ? w : 0.0;
                }
            }
            break;
        }
        case KernelFamily::kir: {
            if (!(g.bandwidth > 0.0)) {
                throw std::invalid_argument("bandwidth must be positive");
            }
            for (Index j = 0; j < n; ++j) {
                double denom = 0.0;
                for (Index i = 0; i < n; ++i) {
                    gm(i, j) = normal_density(std::abs(y[i] - y[j]) / g.bandwidth);
                    denom += gm(i, j);
                }
                denom /= nd;
                if (!(denom > 0.0)) {
                    throw NumericError("smoothing weight denominator underflow at bandwidth " +
                                       std::to_string(g.bandwidth));
                }
                gm.col(j) /= denom;
            }
            break;
        }
        case KernelFamily::pir: {
            const Matrix hm = g.hbasis.eval_all(y);
            const Matrix gram = hm.transpose() * hm / nd;
            const Matrix inv = sym_inverse(gram, 1e-10, "response basis Gram");
            gm.noalias() = hm * inv * hm.transpose();
            break;
        }
    }
    return gm;
}

}  // namespace cssdr
