#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cssdr/css_objective.hpp"
#include "cssdr/evaluation.hpp"
#include "cssdr/nelder_mead.hpp"
#include "cssdr/rng.hpp"

#include <cmath>

using namespace cssdr;

namespace {

Dataset toy_dataset(Rng& rng, Index n, Index p) {
    Matrix x(n, p);
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < p; ++c) {
            x(r, c) = rng.normal();
        }
    }
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = x(i, 0) + 0.5 * x(i, 1) * x(i, 1) + 0.1 * rng.normal();
    }
    return center(make_dataset(x, y));
}

}  // namespace

TEST_CASE("smooth convex function converges to its minimum") {
    const AngleVector start(Vector::Zero(2), 3, 1);
    const auto f = [](const AngleVector& av) { return (av.phi.array() - 1.0).square().sum(); };
    const OptimResult r = nelder_mead(f, start, {});
    CHECK(r.value < 1e-8);
    CHECK(std::abs(r.phi.phi[0] - 1.0) < 1e-4);
    CHECK(std::abs(r.phi.phi[1] - 1.0) < 1e-4);
    CHECK(r.converged);
    CHECK(r.value <= f(start));
}

TEST_CASE("constant function converges immediately at the start") {
    Vector start(2);
    start << 0.3, 0.7;
    const AngleVector phi0(start, 3, 1);
    const OptimResult r = nelder_mead([](const AngleVector&) { return 5.0; }, phi0, {});
    CHECK(r.converged);
    CHECK(r.value == 5.0);
    CHECK((r.phi.phi - start).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("non-finite start is rejected") {
    const AngleVector phi0(Vector::Zero(2), 3, 1);
    CHECK_THROWS_AS(
        nelder_mead([](const AngleVector&) { return std::nan(""); }, phi0, {}),
        NumericError);
}

TEST_CASE("best value trace is non-increasing") {
    Rng rng(3);
    const Dataset ds = toy_dataset(rng, 50, 3);
    const CssObjective obj(ds, GKernel::pir(HBasis{2}), GBasis::full(1, 2));
    const AngleVector start(Vector::Constant(2, 1.0), 3, 1);
    const OptimResult r =
        nelder_mead([&obj](const AngleVector& av) { return obj(av); }, start, {});
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        CHECK(r.trace[i] <= r.trace[i - 1] + 1e-18);
    }
}

TEST_CASE("wrapping a candidate never changes a span-based objective") {
    Rng rng(5);
    const Dataset ds = toy_dataset(rng, 40, 4);
    const CssObjective obj(ds, GKernel::kir(0.5), GBasis::full(2, 2));
    for (int rep = 0; rep < 10; ++rep) {
        Vector phi(angle_count(4, 2));
        for (Index i = 0; i < phi.size(); ++i) {
            phi[i] = rng.uniform(-6.0, 9.0);
        }
        const AngleVector av(phi, 4, 2);
        CHECK(obj(wrap_angles(av)) == doctest::Approx(obj(av)).epsilon(1e-12));
    }
}

TEST_CASE("simplex beats a fine grid on a 2-angle problem") {
    Rng rng(7);
    const Dataset ds = toy_dataset(rng, 40, 3);
    const CssObjective obj(ds, GKernel::ols(), GBasis::full(1, 2));
    const auto f = [&obj](const AngleVector& av) { return obj(av); };

    double grid_min = std::numeric_limits<double>::infinity();
    const int cells = 100;
    for (int a = 0; a < cells; ++a) {
        for (int b = 0; b < cells; ++b) {
            Vector phi(2);
            phi << M_PI * a / cells, M_PI * b / cells;
            grid_min = std::min(grid_min, f(AngleVector(phi, 3, 1)));
        }
    }
    Vector start(2);
    start << 1.0, 1.0;
    const OptimResult r = nelder_mead(f, AngleVector(start, 3, 1), {});
    CHECK(r.value <= grid_min + 1e-3);
}

TEST_CASE("multistart") {
    // Two basins: a quartic with minima near 0.7 (deep) and 2.3 (shallow).
    const auto f = [](const AngleVector& av) {
        const double x = av.phi[0];
        const double a = (x - 0.7) * (x - 0.7);
        const double b = (x - 2.3) * (x - 2.3) + 0.5;
        return std::min(a, b);
    };
    Vector near_deep(1), near_shallow(1);
    near_deep << 0.6;
    near_shallow << 2.4;

    SUBCASE("single initializer equals plain minimization") {
        const OptimResult lone = nelder_mead(f, AngleVector(near_deep, 2, 1), {});
        const OptimResult multi = multistart(f, {AngleVector(near_deep, 2, 1)}, {});
        CHECK(lone.value == multi.value);
        CHECK((lone.phi.phi - multi.phi.phi).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("the lower basin wins") {
        const OptimResult multi = multistart(
            f, {AngleVector(near_shallow, 2, 1), AngleVector(near_deep, 2, 1)}, {});
        CHECK(multi.value < 1e-6);
        CHECK(std::abs(multi.phi.phi[0] - 0.7) < 1e-3);
    }
    SUBCASE("no initializers is an error") {
        CHECK_THROWS_AS(multistart(f, {}, {}), std::invalid_argument);
    }
}

TEST_CASE("restarted fit is no worse than the single-start fit") {
    const Matrix x = simulate_predictors(120, 6, 10);
    const Vector y = simulate_response(x, SimModel::one, 11);
    const Dataset ds = center(make_dataset(x, y));

    FitOptions single;
    single.basis = GBasis::full(2, 2);
    FitOptions multi = single;
    multi.restarts = 5;
    multi.seed = 1234;

    const FitReport a = fit_css(ds, GKernel::sir(10), 2, single);
    const FitReport b = fit_css(ds, GKernel::sir(10), 2, multi);
    CHECK(b.objective_final <= a.objective_final + 1e-15);
}
