#pragma once

#include "cssdr/types.hpp"

#include <vector>

namespace cssdr {

/// Monomial response basis H(y) = (1, y, ..., y^degree)^T. The leading
/// constant entry is required by every consumer.
struct HBasis {
    int degree = 2;

    int size() const { return degree + 1; }

    Vector eval(double y) const;

    /// n x s matrix with rows H(y_i)^T.
    Matrix eval_all(const Vector& y) const;
};

/// Partition of the sample into k slices by order statistics of y.
struct SlicePartition {
    int k = 0;
    std::vector<double> boundaries;  // k-1 cut values (first y of slices 2..k in sort order)
    std::vector<int> assignment;     // slice label in [0, k) per observation
    std::vector<int> counts;         // observations per slice
};

/// Equal-count slicing: sizes floor(n/k) or ceil(n/k) (larger slices first),
/// ties broken by stable sample order. Requires 2 <= k <= n.
SlicePartition make_slices(const Vector& y, int k);

enum class KernelFamily { ols, sir, kir, pir };

const char* family_name(KernelFamily f);

/// Specification of one inverse-regression weight function g(Y, Y~).
struct GKernel {
    KernelFamily family = KernelFamily::ols;
    int slices = 10;        // sir
    double bandwidth = 0.4; // kir
    HBasis hbasis;          // pir

    static GKernel ols() { return {KernelFamily::ols, 10, 0.4, {}}; }
    static GKernel sir(int k) { return {KernelFamily::sir, k, 0.4, {}}; }
    static GKernel kir(double h) { return {KernelFamily::kir, 10, h, {}}; }
    static GKernel pir(HBasis hb) { return {KernelFamily::pir, 10, 0.4, hb}; }
};

/// Normalized smoothing weight psi(|yi-yj|/h) / mean_l psi(|y_l-yj|/h) with
/// psi the standard normal density. Throws NumericError when the denominator
/// underflows (yj too far from the sample at this bandwidth).
double smoothing_weight(double yi, double yj, double h, const Vector& y_sample);

/// Basis kernel H(yi)^T * En[H H^T]^{-1} * H(yj) over the given sample.
double basis_weight(double yi, double yj, const HBasis& hb, const Vector& y_sample);

/// n x n matrix with entries g(y_i, y_j); column j conditions on y_j.
Matrix kernel_matrix(const GKernel& g, const Vector& y);

}  // namespace cssdr
