#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cssdr/estimators.hpp"
#include "cssdr/evaluation.hpp"
#include "cssdr/linalg.hpp"
#include "cssdr/rng.hpp"

#include <cmath>

using namespace cssdr;

namespace {

Dataset random_centered(Rng& rng, Index n, Index p) {
    Matrix x(n, p);
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < p; ++c) {
            x(r, c) = rng.normal();
        }
    }
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = rng.normal() + 0.5 * x(i, 0);
    }
    return center(make_dataset(x, y));
}

// Independent slice-mean assembly of the sliced-regression candidate.
Matrix sir_by_hand(const Dataset& ds, int k) {
    const auto n = static_cast<double>(ds.n());
    const SlicePartition part = make_slices(ds.y, k);
    const Matrix sigma = covariance(ds).sigma;
    const Matrix sigma_inv = sigma.inverse();
    Matrix middle = Matrix::Zero(ds.p(), ds.p());
    for (int s = 0; s < k; ++s) {
        Vector mean = Vector::Zero(ds.p());
        int count = 0;
        for (Index i = 0; i < ds.n(); ++i) {
            if (part.assignment[static_cast<std::size_t>(i)] == s) {
                mean += ds.X.row(i).transpose();
                ++count;
            }
        }
        mean /= static_cast<double>(count);
        middle += (count / n) * mean * mean.transpose();
    }
    return sigma_inv * middle * sigma_inv;
}

}  // namespace

TEST_CASE("ols candidate vanishes for a constant response") {
    Rng rng(3);
    Matrix x(20, 3);
    for (Index r = 0; r < 20; ++r) {
        for (Index c = 0; c < 3; ++c) {
            x(r, c) = rng.normal();
        }
    }
    const Dataset ds = center(make_dataset(x, Vector::Constant(20, 4.2)));
    const CandidateMatrix cm = candidate_matrix(ds, GKernel::ols());
    CHECK(cm.A.cwiseAbs().maxCoeff() < 1e-20);
}

TEST_CASE("sir candidate equals the hand-built slice-mean formula") {
    Rng rng(5);
    const Dataset ds = random_centered(rng, 20, 3);
    const CandidateMatrix cm = candidate_matrix(ds, GKernel::sir(4));
    const Matrix reference = sir_by_hand(ds, 4);
    CHECK((cm.A - reference).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sir slice route and kernel-weight route agree exactly") {
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const Dataset ds = random_centered(rng, 20, 3);
        const GKernel g = GKernel::sir(4);
        const CandidateMatrix via_slices = candidate_matrix(ds, g);
        const Matrix via_kernel = candidate_from_kernel_matrix(ds, kernel_matrix(g, ds.y));
        CHECK((via_slices.A - via_kernel).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("pir with a linear basis spans the ols direction on centered data") {
    Rng rng(9);
    const Dataset ds = random_centered(rng, 200, 4);
    const Matrix a_pir = candidate_matrix(ds, GKernel::pir(HBasis{1})).A;
    const Matrix a_ols = candidate_matrix(ds, GKernel::ols()).A;
    const Vector top_pir = leading_span(CandidateMatrix{a_pir, {}, {}, GKernel::ols()}, 1).beta.col(0);
    const Vector top_ols = leading_span(CandidateMatrix{a_ols, {}, {}, GKernel::ols()}, 1).beta.col(0);
    CHECK(std::abs(top_pir.dot(top_ols)) > 0.999);
}

TEST_CASE("kir candidate agrees with the generic kernel-matrix route") {
    Rng rng(11);
    const Dataset ds = random_centered(rng, 25, 3);
    const GKernel g = GKernel::kir(0.4);
    const CandidateMatrix cm = candidate_matrix(ds, g);
    const Matrix generic = candidate_from_kernel_matrix(ds, kernel_matrix(g, ds.y));
    CHECK((cm.A - generic).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("pir candidate agrees with the generic kernel-matrix route") {
    Rng rng(13);
    const Dataset ds = random_centered(rng, 25, 3);
    const GKernel g = GKernel::pir(HBasis{2});
    const CandidateMatrix cm = candidate_matrix(ds, g);
    const Matrix generic = candidate_from_kernel_matrix(ds, kernel_matrix(g, ds.y));
    CHECK((cm.A - generic).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("all four candidates are symmetric PSD") {
    Rng rng(17);
    const Dataset ds = random_centered(rng, 40, 4);
    for (const GKernel& g :
         {GKernel::ols(), GKernel::sir(5), GKernel::kir(0.4), GKernel::pir(HBasis{2})}) {
        const CandidateMatrix cm = candidate_matrix(ds, g);
        CHECK((cm.A - cm.A.transpose()).cwiseAbs().maxCoeff() < 1e-10);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(cm.A);
        CHECK(eig.eigenvalues().minCoeff() > -1e-10);
    }
}

TEST_CASE("leading span") {
    SUBCASE("diagonal candidate picks the top axes") {
        Matrix a = Vector::LinSpaced(3, 3.0, 1.0).asDiagonal();
        const ClassicalFit fit = leading_span(CandidateMatrix{a, {}, {}, GKernel::ols()}, 2);
        CHECK(fit.eigenvalues[0] == doctest::Approx(3.0));
        CHECK(fit.eigenvalues[1] == doctest::Approx(2.0));
        // span{e1, e2}
        CHECK(std::abs(fit.beta.col(0)[0]) == doctest::Approx(1.0));
        CHECK(std::abs(fit.beta.col(1)[1]) == doctest::Approx(1.0));
        CHECK_FALSE(fit.tied_at_cut);
    }
    SUBCASE("tied eigenvalues at the cut are flagged") {
        Matrix a = Matrix::Zero(3, 3);
        a.diagonal() << 2.0, 1.0, 1.0;
        const ClassicalFit fit = leading_span(CandidateMatrix{a, {}, {}, GKernel::ols()}, 2);
        CHECK(fit.tied_at_cut);
    }
    SUBCASE("rank-one candidate recovers its direction") {
        Rng rng(19);
        Vector v(4);
        for (Index i = 0; i < 4; ++i) v[i] = rng.normal();
        v.normalize();
        const Matrix a = v * v.transpose();
        const ClassicalFit fit = leading_span(CandidateMatrix{a, {}, {}, GKernel::ols()}, 1);
        CHECK(std::abs(fit.beta.col(0).dot(v)) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("d out of range") {
        const Matrix a = Matrix::Identity(3, 3);
        CHECK_THROWS_AS(leading_span(CandidateMatrix{a, {}, {}, GKernel::ols()}, 4),
                        std::invalid_argument);
    }
}

TEST_CASE("frame_to_angles") {
    SUBCASE("identity slab maps to zero angles") {
        const AngleVector av = frame_to_angles(Matrix::Identity(5, 2));
        CHECK(av.phi.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("p=2 d=1 unit vector (0,1)") {
        Matrix b(2, 1);
        b << 0, 1;
        const AngleVector av = frame_to_angles(b);
        CHECK(av.phi[0] == doctest::Approx(M_PI / 2.0));
    }
    SUBCASE("round trip spans random frames") {
        Rng rng(23);
        Matrix z(200, 6);
        for (Index r = 0; r < 200; ++r) {
            for (Index c = 0; c < 6; ++c) {
                z(r, c) = rng.normal();
            }
        }
        for (int rep = 0; rep < 20; ++rep) {
            Matrix raw(6, 2);
            for (Index r = 0; r < 6; ++r) {
                for (Index c = 0; c < 2; ++c) {
                    raw(r, c) = rng.normal();
                }
            }
            const Matrix beta = orthonormal_columns(raw);
            const Matrix rebuilt = frame(frame_to_angles(beta));
            const double rho = trace_correlation(z * beta, z * rebuilt);
            CHECK(rho == doctest::Approx(2.0).epsilon(1e-8));
        }
    }
    SUBCASE("rejects non-orthonormal input") {
        Matrix b(3, 1);
        b << 1, 1, 0;
        CHECK_THROWS_AS(frame_to_angles(b), std::invalid_argument);
    }
}

TEST_CASE("linear model: every classical estimator recovers the direction at n=2000") {
    Rng rng(29);
    const Index n = 2000;
    Matrix x(n, 4);
    for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < 4; ++c) {
            x(r, c) = rng.normal();
        }
    }
    Vector beta0(4);
    beta0 << 0.5, -0.5, 0.5, 0.5;
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = x.row(i).dot(beta0) + 0.3 * rng.normal();
    }
    const Dataset ds = center(make_dataset(x, y));
    for (const GKernel& g :
         {GKernel::ols(), GKernel::sir(10), GKernel::kir(0.4), GKernel::pir(HBasis{2})}) {
        const ClassicalFit fit = classical_fit(ds, g, 1);
        const double rho = trace_correlation(x * fit.beta, x * beta0);
        CHECK(rho > 0.9);
    }
}

TEST_CASE("singular covariance is rejected") {
    Matrix x(10, 2);
    for (Index i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i);
        x(i, 1) = 2.0 * static_cast<double>(i);  // exactly collinear
    }
    Vector y = Vector::LinSpaced(10, 0.0, 1.0);
    const Dataset ds = center(make_dataset(x, y));
    CHECK_THROWS_AS(candidate_matrix(ds, GKernel::ols()), NumericError);
}
