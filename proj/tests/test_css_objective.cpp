#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cssdr/css_objective.hpp"
#include "cssdr/evaluation.hpp"
#include "cssdr/linalg.hpp"
#include "cssdr/rng.hpp"

#include <cmath>

using namespace cssdr;

namespace {

Matrix random_matrix(Rng& rng, Index n, Index p) {
    Matrix x(n, p);
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < p; ++c) {
            x(r, c) = rng.normal();
        }
    }
    return x;
}

// Data whose predictors are exact basis polynomials of a single index, so
// the fitted conditional mean reproduces X and every objective is zero.
Dataset polynomial_dataset(Rng& rng, Index n, Vector* beta_out) {
    Matrix x(n, 3);
    for (Index i = 0; i < n; ++i) {
        const double u = rng.uniform(-1.5, 1.5);
        x(i, 0) = u;
        x(i, 1) = u * u;
        x(i, 2) = 0.5 * u - 0.25 * u * u;
    }
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = x(i, 1) + 0.1 * rng.normal();
    }
    if (beta_out != nullptr) {
        Vector b(3);
        b << 1, 0, 0;
        *beta_out = b;
    }
    return make_dataset(x, y);
}

}  // namespace

TEST_CASE("basis term enumeration") {
    SUBCASE("d=1 degree 2 features at u=2") {
        const GBasis gb = GBasis::full(1, 2);
        REQUIRE(gb.size() == 3);
        Matrix u(1, 1);
        u << 2.0;
        const Matrix feats = poly_features(u, gb);
        CHECK(feats(0, 0) == 1.0);
        CHECK(feats(0, 1) == 2.0);
        CHECK(feats(0, 2) == 4.0);
    }
    SUBCASE("d=2 degree 2 has d(d+3)/2 + 1 = 6 terms") {
        CHECK(GBasis::full(2, 2).size() == 6);
    }
    SUBCASE("d=2 degree 3 full family includes all cubics") {
        const GBasis gb = GBasis::full(2, 3);
        CHECK(gb.size() == 10);
        // last term is the pure cube of the second coordinate
        CHECK(gb.terms.back() == std::vector<int>{0, 3});
    }
    SUBCASE("pure powers leave out cross terms") {
        const GBasis gb = GBasis::pure_powers(2, 3);
        CHECK(gb.size() == 8);  // full quadratic family plus the two pure cubes
    }
    SUBCASE("first term is the constant") {
        for (const GBasis& gb : {GBasis::full(3, 2), GBasis::pure_powers(3, 2)}) {
            CHECK(gb.terms.front() == std::vector<int>{0, 0, 0});
        }
    }
}

TEST_CASE("directional feature derivative matches finite differences") {
    Rng rng(3);
    const GBasis gb = GBasis::full(2, 3);
    const Matrix u = random_matrix(rng, 7, 2);
    const Matrix w = random_matrix(rng, 7, 2);
    const double step = 1e-6;
    const Matrix fd =
        (poly_features(u + step * w, gb) - poly_features(u - step * w, gb)) / (2.0 * step);
    const Matrix analytic = poly_features_directional(u, gb, w);
    CHECK((fd - analytic).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("fitted mean") {
    SUBCASE("reproduces predictors that live in the feature space") {
        Rng rng(5);
        const Dataset ds = center(polynomial_dataset(rng, 60, nullptr));
        Matrix eta(3, 1);
        eta << 1, 0, 0;
        const Matrix fhat = fitted_mean(eta, ds, GBasis::full(1, 2));
        CHECK((fhat - ds.X).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("constant-only basis returns the column means") {
        Rng rng(7);
        const Dataset ds = center(make_dataset(random_matrix(rng, 30, 3),
                                               random_matrix(rng, 30, 1).col(0)));
        Matrix eta(3, 1);
        eta << 1, 0, 0;
        const Matrix fhat = fitted_mean(eta, ds, GBasis::full(1, 0));
        CHECK(fhat.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("matches an independent least-squares solve") {
        Rng rng(9);
        const Index n = 15;
        const Dataset ds = center(make_dataset(random_matrix(rng, n, 3),
                                               random_matrix(rng, n, 1).col(0)));
        Matrix eta(3, 2);
        eta << 1, 0, 0, 1, 0, 0;
        eta = orthonormal_columns(eta);
        const GBasis gb = GBasis::full(2, 2);

        const Matrix feats = poly_features(ds.X * eta, gb);
        Matrix expected(n, 3);
        for (Index c = 0; c < 3; ++c) {
            expected.col(c) = feats * feats.colPivHouseholderQr().solve(ds.X.col(c));
        }
        const Matrix fhat = fitted_mean(eta, ds, gb);
        CHECK((fhat - expected).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("objective is zero when the residual vanishes, for every kernel") {
    Rng rng(11);
    Vector beta0;
    const Dataset ds = center(polynomial_dataset(rng, 80, &beta0));
    const AngleVector phi_true = frame_to_angles(beta0);
    for (const GKernel& g :
         {GKernel::ols(), GKernel::sir(5), GKernel::kir(0.4), GKernel::pir(HBasis{2})}) {
        const CssObjective obj(ds, g, GBasis::full(1, 2));
        CHECK(obj(phi_true) < 1e-16);
    }
}

TEST_CASE("ols objective equals a direct sum") {
    Rng rng(13);
    const Index n = 10;
    const Dataset ds = center(make_dataset(random_matrix(rng, n, 3),
                                           random_matrix(rng, n, 1).col(0)));
    const GBasis gb = GBasis::full(1, 2);
    Matrix eta(3, 1);
    eta << 0, 1, 0;
    const AngleVector phi = frame_to_angles(eta);

    const CssObjective obj(ds, GKernel::ols(), gb);
    const Matrix fhat = fitted_mean(frame(phi), ds, gb);
    double direct = 0.0;
    for (Index i = 0; i < n; ++i) {
        direct += ((ds.X.row(i) - fhat.row(i)) * ds.y[i]).squaredNorm();
    }
    direct /= static_cast<double>(n);
    CHECK(obj(phi) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("kir and pir objectives equal their double sums") {
    Rng rng(15);
    const Index n = 20;
    const Dataset ds = center(make_dataset(random_matrix(rng, n, 3),
                                           random_matrix(rng, n, 1).col(0)));
    const GBasis gb = GBasis::full(1, 2);
    Matrix eta(3, 1);
    eta << 0, 0, 1;
    const AngleVector phi = frame_to_angles(eta);
    const Matrix fhat = fitted_mean(frame(phi), ds, gb);
    const Matrix residual = ds.X - fhat;

    for (const GKernel& g : {GKernel::kir(0.4), GKernel::pir(HBasis{2})}) {
        const Matrix gm = kernel_matrix(g, ds.y);
        double direct = 0.0;
        for (Index j = 0; j < n; ++j) {
            Vector inner = Vector::Zero(3);
            for (Index i = 0; i < n; ++i) {
                inner += residual.row(i).transpose() * gm(i, j);
            }
            inner /= static_cast<double>(n);
            direct += inner.squaredNorm();
        }
        direct /= static_cast<double>(n);
        const CssObjective obj(ds, g, gb);
        CHECK(obj(phi) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("sir objective equals the slice-weighted display") {
    Rng rng(17);
    const Index n = 24;
    const Dataset ds = center(make_dataset(random_matrix(rng, n, 3),
                                           random_matrix(rng, n, 1).col(0)));
    const GBasis gb = GBasis::full(1, 2);
    Matrix eta(3, 1);
    eta << 1, 0, 0;
    const AngleVector phi = frame_to_angles(eta);
    const Matrix residual = ds.X - fitted_mean(frame(phi), ds, gb);

    const int k = 4;
    const SlicePartition part = make_slices(ds.y, k);
    double direct = 0.0;
    for (int s = 0; s < k; ++s) {
        Vector mean = Vector::Zero(3);
        for (Index i = 0; i < n; ++i) {
            if (part.assignment[static_cast<std::size_t>(i)] == s) {
                mean += residual.row(i).transpose();
            }
        }
        const double count = part.counts[static_cast<std::size_t>(s)];
        mean /= count;
        direct += (count / static_cast<double>(n)) * mean.squaredNorm();
    }
    direct /= static_cast<double>(n);

    const CssObjective obj(ds, GKernel::sir(k), gb);
    CHECK(obj(phi) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("true span minimizes the objective among random frames") {
    // Nonelliptical design with the response driven by (x1, x2): there the
    // conditional mean of the remaining predictors is an exact quadratic of
    // the reduced coordinates, so the population minimizer is the true span.
    Rng rng(19);
    const Matrix x = simulate_predictors(2000, 4, 101);
    Vector y(x.rows());
    for (Index i = 0; i < y.size(); ++i) {
        y[i] = std::exp(x(i, 0)) + (x(i, 1) + 1.5) * (x(i, 1) + 1.5) + rng.normal();
    }
    const Dataset ds = center(make_dataset(x, y));
    Matrix beta_true(4, 2);
    beta_true.setZero();
    beta_true(0, 0) = 1.0;
    beta_true(1, 1) = 1.0;
    const AngleVector phi_true = frame_to_angles(beta_true);

    const CssObjective obj(ds, GKernel::kir(0.4), GBasis::full(2, 3));
    const double at_truth = obj(phi_true);
    for (int rep = 0; rep < 20; ++rep) {
        Vector phi(angle_count(4, 2));
        for (Index i = 0; i < phi.size(); ++i) {
            phi[i] = rng.uniform(0.0, M_PI);
        }
        CHECK(at_truth <= obj(AngleVector(phi, 4, 2)));
    }
}

TEST_CASE("objective depends on the frame only through its span (full basis)") {
    Rng rng(23);
    const Dataset ds = center(make_dataset(random_matrix(rng, 60, 4),
                                           random_matrix(rng, 60, 1).col(0)));
    const GBasis gb = GBasis::full(2, 2);
    const CssObjective obj(ds, GKernel::pir(HBasis{2}), gb);

    for (int rep = 0; rep < 5; ++rep) {
        Vector phi(angle_count(4, 2));
        for (Index i = 0; i < phi.size(); ++i) {
            phi[i] = rng.uniform(0.0, M_PI);
        }
        const AngleVector av(phi, 4, 2);
        const Matrix eta = frame(av);

        Matrix mix(2, 2);
        mix << rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
            rng.uniform(0.5, 2.0);
        mix(1, 1) += 1.0;  // keep it invertible
        const Matrix remixed = orthonormal_columns(eta * mix);
        const AngleVector av2 = frame_to_angles(remixed);

        CHECK(obj(av2) == doctest::Approx(obj(av)).epsilon(1e-8));
    }
}

TEST_CASE("fit_css") {
    SUBCASE("monotone improvement and report consistency") {
        const Matrix x = simulate_predictors(100, 4, 7);
        const Vector y = simulate_response(x, SimModel::three, 8);
        const Dataset ds = center(make_dataset(x, y));
        FitOptions opts;
        opts.basis = GBasis::full(2, 3);
        const FitReport report = fit_css(ds, GKernel::kir(0.4), 2, opts);
        CHECK(report.objective_final <= report.objective_initial);
        for (std::size_t i = 1; i < report.trace.size(); ++i) {
            CHECK(report.trace[i] <= report.trace[i - 1] + 1e-15);
        }
        CHECK(orthonormality_defect(report.beta) < 1e-10);
    }
    SUBCASE("d equals p returns the identity span without optimizing") {
        Rng rng(29);
        const Dataset ds = center(make_dataset(random_matrix(rng, 40, 3),
                                               random_matrix(rng, 40, 1).col(0)));
        const FitReport report = fit_css(ds, GKernel::ols(), 3);
        CHECK((report.beta - Matrix::Identity(3, 3)).norm() == 0.0);
        CHECK(report.objective_final == report.objective_initial);
    }
    SUBCASE("elliptical predictors: css fit agrees with the classical fit") {
        Rng rng(31);
        const Index n = 2000;
        Matrix x = random_matrix(rng, n, 4);  // multivariate normal
        Vector beta0(4);
        beta0 << 0.5, 0.5, -0.5, 0.5;
        Vector y(n);
        for (Index i = 0; i < n; ++i) {
            const double u = x.row(i).dot(beta0);
            y[i] = u * u * u / 3.0 + 0.5 * rng.normal();
        }
        const Dataset ds = center(make_dataset(x, y));
        const ClassicalFit classical = classical_fit(ds, GKernel::sir(10), 1);
        FitOptions opts;
        opts.basis = GBasis::full(1, 2);
        const FitReport css = fit_css(ds, GKernel::sir(10), 1, opts);

        const double rho_classical = trace_correlation(x * classical.beta, x * beta0);
        const double rho_css = trace_correlation(x * css.beta, x * beta0);
        CHECK(std::abs(rho_css - rho_classical) < 0.05);
    }
    SUBCASE("restarts are deterministic under a fixed seed") {
        const Matrix x = simulate_predictors(80, 4, 17);
        const Vector y = simulate_response(x, SimModel::two, 18);
        const Dataset ds = center(make_dataset(x, y));
        FitOptions opts;
        opts.basis = GBasis::full(2, 2);
        opts.restarts = 3;
        opts.seed = 99;
        const FitReport a = fit_css(ds, GKernel::pir(HBasis{2}), 2, opts);
        const FitReport b = fit_css(ds, GKernel::pir(HBasis{2}), 2, opts);
        CHECK((a.phi.phi - b.phi.phi).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.objective_final == b.objective_final);
    }
}
