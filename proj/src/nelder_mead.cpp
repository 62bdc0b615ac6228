#include "cssdr/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace cssdr {

namespace {

struct Vertex {
    AngleVector x;
    double f = 0.0;
};

struct PassResult {
    AngleVector phi;  // raw (unwrapped) coordinates
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

// One simplex descent on the raw angle coordinates. The objective is
// periodic in every coordinate, so the box needs no enforcement here.
PassResult simplex_pass(const ObjectiveFn& f, const AngleVector& phi0, const OptimOptions& opts,
                        int& evaluations, std::vector<double>& trace) {
    const int m = phi0.m();
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : 500 * std::max(m, 1);

    auto eval = [&](const AngleVector& x) {
        ++evaluations;
        return f(x);
    };
    auto at = [&](const Vector& v) { return AngleVector(v, phi0.p, phi0.d); };

    std::vector<Vertex> simplex;
    simplex.reserve(static_cast<std::size_t>(m) + 1);
    {
        Vertex v0{phi0, 0.0};
        v0.f = eval(v0.x);
        if (!std::isfinite(v0.f)) {
            throw NumericError("objective is not finite at the initial point");
        }
        simplex.push_back(std::move(v0));
        for (int i = 0; i < m; ++i) {
            Vector shifted = phi0.phi;
            shifted[i] += opts.initial_step;
            Vertex vi{at(shifted), 0.0};
            vi.f = eval(vi.x);
            simplex.push_back(std::move(vi));
        }
    }

    PassResult result;
    int best = 0;
    for (int iter = 1; iter <= max_iter; ++iter) {
        result.iterations = iter;
        best = 0;
        int worst = 0;
        for (std::size_t i = 1; i < simplex.size(); ++i) {
            if (simplex[i].f < simplex[best].f) best = static_cast<int>(i);
            if (simplex[i].f > simplex[worst].f) worst = static_cast<int>(i);
        }
        if (worst == best) worst = best == 0 ? 1 : 0;
        int second = -1;
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            const auto ii = static_cast<int>(i);
            if (ii == worst) continue;
            if (second < 0 || simplex[i].f > simplex[static_cast<std::size_t>(second)].f) {
                second = ii;
            }
        }

        const double fb = simplex[static_cast<std::size_t>(best)].f;
        const double fw = simplex[static_cast<std::size_t>(worst)].f;
        trace.push_back(fb);

        if (2.0 * std::abs(fw - fb) <=
            opts.f_tol * (std::abs(fw) + std::abs(fb)) + std::numeric_limits<double>::min()) {
            result.converged = true;
            break;
        }
        double diameter = 0.0;
        for (const auto& v : simplex) {
            diameter = std::max(
                diameter,
                (v.x.phi - simplex[static_cast<std::size_t>(best)].x.phi).cwiseAbs().maxCoeff());
        }
        if (diameter <= opts.x_tol) {
            result.converged = true;
            break;
        }

        Vector centroid = Vector::Zero(m);
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (static_cast<int>(i) != worst) {
                centroid += simplex[i].x.phi;
            }
        }
        centroid /= static_cast<double>(m);

        const Vector dir = centroid - simplex[static_cast<std::size_t>(worst)].x.phi;
        auto try_point = [&](double scale) {
            Vertex v{at(centroid + scale * dir), 0.0};
            v.f = eval(v.x);
            return v;
        };

        Vertex reflected = try_point(1.0);
        if (reflected.f < fb) {
            Vertex expanded = try_point(2.0);
            simplex[static_cast<std::size_t>(worst)] =
                expanded.f < reflected.f ? std::move(expanded) : std::move(reflected);
            continue;
        }
        if (reflected.f < simplex[static_cast<std::size_t>(second)].f) {
            simplex[static_cast<std::size_t>(worst)] = std::move(reflected);
            continue;
        }
        // Contraction: outside when the reflection improved on the worst
        // vertex, inside otherwise.
        const bool outside = reflected.f < fw;
        Vertex contracted = try_point(outside ? 0.5 : -0.5);
        if (contracted.f < std::min(reflected.f, fw)) {
            simplex[static_cast<std::size_t>(worst)] = std::move(contracted);
            continue;
        }
        // Shrink toward the best vertex.
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (static_cast<int>(i) == best) continue;
            const Vector shrunk =
                simplex[static_cast<std::size_t>(best)].x.phi +
                0.5 * (simplex[i].x.phi - simplex[static_cast<std::size_t>(best)].x.phi);
            simplex[i].x = at(shrunk);
            simplex[i].f = eval(simplex[i].x);
        }
    }

    best = 0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
        if (simplex[i].f < simplex[best].f) best = static_cast<int>(i);
    }
    result.phi = simplex[static_cast<std::size_t>(best)].x;
    result.value = simplex[static_cast<std::size_t>(best)].f;
    return result;
}

}  // namespace

OptimResult nelder_mead(const ObjectiveFn& f, const AngleVector& phi0, const OptimOptions& opts) {
    OptimResult result;
    PassResult incumbent = simplex_pass(f, phi0, opts, result.evaluations, result.trace);
    result.iterations = incumbent.iterations;
    for (int round = 1; round < std::max(opts.max_rounds, 1); ++round) {
        PassResult next = simplex_pass(f, incumbent.phi, opts, result.evaluations, result.trace);
        result.iterations += next.iterations;
        const bool improved = incumbent.value - next.value >
                              opts.restart_tol * (std::abs(incumbent.value) +
                                                  std::numeric_limits<double>::min());
        if (next.value < incumbent.value) {
            incumbent = std::move(next);
        }
        if (!improved) {
            break;
        }
    }
    result.phi = wrap_angles(incumbent.phi);
    result.value = incumbent.value;
    result.converged = incumbent.converged;
    if (result.trace.empty() || result.trace.back() > result.value) {
        result.trace.push_back(result.value);
    }
    // Trace is best-vertex per iteration within passes; make the recorded
    // sequence globally non-increasing across restarts.
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
        result.trace[i] = std::min(result.trace[i], result.trace[i - 1]);
    }
    return result;
}

OptimResult multistart(const ObjectiveFn& f, const std::vector<AngleVector>& inits,
                       const OptimOptions& opts) {
    if (inits.empty()) {
        throw std::invalid_argument("multistart needs at least one initializer");
    }
    OptimResult best;
    bool have = false;
    for (const AngleVector& init : inits) {
        OptimResult r = nelder_mead(f, init, opts);
        if (!have || r.value < best.value) {
            const int evals = have ? best.evaluations + r.evaluations : r.evaluations;
            best = std::move(r);
            best.evaluations = evals;
            have = true;
        } else {
            best.evaluations += r.evaluations;
        }
    }
    return best;
}

}  // namespace cssdr
