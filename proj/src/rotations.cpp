#include "cssdr/rotations.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace cssdr {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_dims(int p, int d) {
    if (p < 1 || d < 1 || d > p) {
        throw std::invalid_argument("frame dimensions require 1 <= d <= p, got p=" +
                                    std::to_string(p) + " d=" + std::to_string(d));
    }
}

// Rotate rows (i, j) of a slab in place: premultiply by the plane rotation.
inline void apply_rotation_rows(Matrix& slab, int i, int j, double c, double s) {
    for (Index col = 0; col < slab.cols(); ++col) {
        const double a = slab(i, col);
        const double b = slab(j, col);
        slab(i, col) = c * a - s * b;
        slab(j, col) = s * a + c * b;
    }
}

}  // namespace

AngleVector::AngleVector(Vector angles, int p_dim, int d_dim) : phi(std::move(angles)), p(p_dim), d(d_dim) {
    check_dims(p, d);
    if (static_cast<int>(phi.size()) != angle_count(p, d)) {
        throw std::invalid_argument("angle vector has " + std::to_string(phi.size()) +
                                    " entries, expected " + std::to_string(angle_count(p, d)));
    }
}

int angle_count(int p, int d) {
    check_dims(p, d);
    return p * d - d * (d + 1) / 2;
}

int pair_to_index(int i, int j, int p, int d) {
    check_dims(p, d);
    if (i < 0 || i >= d || j <= i || j >= p) {
        throw std::invalid_argument("plane pair out of range: (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") for p=" + std::to_string(p) +
                                    " d=" + std::to_string(d));
    }
    // Rows before i contribute p - 1 - r planes each; within row i, j counts up.
    return i * p - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<int, int> index_to_pair(int t, int p, int d) {
    check_dims(p, d);
    const int m = angle_count(p, d);
    if (t < 0 || t >= m) {
        throw std::invalid_argument("angle index " + std::to_string(t) + " out of range [0, " +
                                    std::to_string(m) + ")");
    }
    int i = 0;
    int offset = 0;
    while (offset + (p - 1 - i) <= t) {
        offset += p - 1 - i;
        ++i;
    }
    const int j = i + 1 + (t - offset);
    return {i, j};
}

Matrix givens_rotation(int p, int i, int j, double angle) {
    if (i < 0 || j <= i || j >= p) {
        throw std::invalid_argument("rotation plane out of range: (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ") for p=" + std::to_string(p));
    }
    Matrix g = Matrix::Identity(p, p);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    g(i, i) = c;
    g(j, j) = c;
    g(i, j) = -s;
    g(j, i) = s;
    return g;
}

Matrix frame(const AngleVector& av) {
    Matrix slab = Matrix::Identity(av.p, av.d);
    for (int t = av.m() - 1; t >= 0; --t) {
        const auto [i, j] = index_to_pair(t, av.p, av.d);
        apply_rotation_rows(slab, i, j, std::cos(av.phi[t]), std::sin(av.phi[t]));
    }
    return slab;
}

Matrix frame_derivative(const AngleVector& av, int t) {
    const int m = av.m();
    if (t < 0 || t >= m) {
        throw std::invalid_argument("derivative index " + std::to_string(t) +
                                    " out of range [0, " + std::to_string(m) + ")");
    }
    Matrix slab = Matrix::Identity(av.p, av.d);
    for (int u = m - 1; u > t; --u) {
        const auto [i, j] = index_to_pair(u, av.p, av.d);
        apply_rotation_rows(slab, i, j, std::cos(av.phi[u]), std::sin(av.phi[u]));
    }
    // Derivative block: rows i and j get the rotated combination, all other
    // rows of the slab are annihilated.
    {
        const auto [i, j] = index_to_pair(t, av.p, av.d);
        const double c = std::cos(av.phi[t]);
        const double s = std::sin(av.phi[t]);
        const Vector row_i = slab.row(i);
        const Vector row_j = slab.row(j);
        slab.setZero();
        slab.row(i) = -s * row_i.transpose() - c * row_j.transpose();
        slab.row(j) = c * row_i.transpose() - s * row_j.transpose();
    }
    for (int u = t - 1; u >= 0; --u) {
        const auto [i, j] = index_to_pair(u, av.p, av.d);
        apply_rotation_rows(slab, i, j, std::cos(av.phi[u]), std::sin(av.phi[u]));
    }
    return slab;
}

AngleVector wrap_angles(const AngleVector& av) {
    Vector out(av.m());
    std::vector<int> sign(static_cast<std::size_t>(av.p), 1);
    for (int t = 0; t < av.m(); ++t) {
        const auto [i, j] = index_to_pair(t, av.p, av.d);
        double angle = av.phi[t];
        // Commute the accumulated sign matrix past this rotation: a plane
        // meeting it in exactly one flipped coordinate negates the angle.
        if (sign[i] * sign[j] < 0) {
            angle = -angle;
        }
        angle = std::fmod(angle, 2.0 * kPi);
        if (angle < 0.0) {
            angle += 2.0 * kPi;
        }
        if (angle >= kPi) {
            angle -= kPi;
            sign[i] = -sign[i];
            sign[j] = -sign[j];
        }
        out[t] = angle;
    }
    // Remaining signs only flip columns of eta; span is untouched.
    return AngleVector(std::move(out), av.p, av.d);
}

}  // namespace cssdr
