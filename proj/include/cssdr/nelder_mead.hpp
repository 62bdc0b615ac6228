#pragma once

#include "cssdr/rotations.hpp"

#include <functional>
#include <vector>

namespace cssdr {

struct OptimOptions {
    int max_iter = 0;      // per simplex pass; 0 -> 500 * m
    double f_tol = 1e-8;   // relative best/worst objective spread
    double x_tol = 1e-6;   // max-norm simplex diameter
    double initial_step = 0.5;
    // The simplex is rebuilt at the incumbent minimizer and re-run until a
    // pass improves the value by less than restart_tol (relative), up to
    // max_rounds passes. Restarting a collapsed simplex is the standard
    // guard against premature convergence.
    int max_rounds = 10;
    double restart_tol = 1e-6;
};

struct OptimResult {
    AngleVector phi;
    double value = 0.0;
    std::vector<double> trace;  // best value per iteration, non-increasing
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
};

using ObjectiveFn = std::function<double(const AngleVector&)>;

/// Nelder-Mead simplex minimization over [0, pi)^m with reflection 1,
/// expansion 2, contraction 0.5 and shrink 0.5. Candidate vertices are
/// wrapped (span-preserving) before evaluation, so the box is handled by
/// periodicity rather than clipping. The returned value never exceeds
/// f(phi0). Throws NumericError if f is non-finite at the start.
OptimResult nelder_mead(const ObjectiveFn& f, const AngleVector& phi0, const OptimOptions& opts);

/// Independent runs from each initializer; returns the lowest final value,
/// ties broken by initializer order.
OptimResult multistart(const ObjectiveFn& f, const std::vector<AngleVector>& inits,
                       const OptimOptions& opts);

}  // namespace cssdr
