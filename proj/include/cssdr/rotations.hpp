#pragma once

#include "cssdr/types.hpp"

#include <utility>

namespace cssdr {

/// Angles of the polar (plane-rotation) parameterization of a p x d
/// orthonormal frame. A frame is the first d columns of the product
/// D_1(phi_1) * ... * D_m(phi_m), where D_t rotates the plane (i, j) given by
/// index_to_pair(t) and m = p*d - d*(d+1)/2. The plane pairs run over
/// 0 <= i < d, i < j < p with j varying fastest.
struct AngleVector {
    Vector phi;
    int p = 0;
    int d = 0;

    AngleVector() = default;
    AngleVector(Vector angles, int p, int d);

    int m() const { return static_cast<int>(phi.size()); }
};

/// Number of free angles for a p x d frame: p*d - d*(d+1)/2.
int angle_count(int p, int d);

/// Flat index t of plane (i, j), 0-based; requires 0 <= i < d and i < j < p.
int pair_to_index(int i, int j, int p, int d);

/// Plane (i, j) of flat index t. Inverse of pair_to_index.
std::pair<int, int> index_to_pair(int t, int p, int d);

/// p x p plane rotation: identity except rows/cols (i, j), where it acts as
/// [[cos, -sin], [sin, cos]].
Matrix givens_rotation(int p, int i, int j, double angle);

/// The p x d orthonormal frame eta(phi): first d columns of the ordered
/// rotation product.
Matrix frame(const AngleVector& av);

/// Analytic derivative d eta / d phi_t (p x d): the product with factor t
/// replaced by the elementwise derivative of its rotation block.
Matrix frame_derivative(const AngleVector& av, int t);

/// Map every angle into [0, pi) while preserving span(eta) exactly.
///
/// Subtracting pi from one angle multiplies its rotation by a diagonal sign
/// matrix; that sign matrix is pushed through the remaining factors of the
/// product, negating the angle of any later rotation whose plane meets it in
/// exactly one coordinate. The leftover signs land on the columns of eta, so
/// the column space is unchanged (columns may flip sign).
AngleVector wrap_angles(const AngleVector& av);

}  // namespace cssdr
