#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mess/basis.hpp"
#include "mess/errors.hpp"
#include "mess/metrics.hpp"

#include "testutil.hpp"

using namespace mess;

namespace {

double max_gram_deviation(const Matrix& q) {
    double worst = 0.0;
    for (std::size_t a = 0; a < q.cols(); ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            const double g = dot(q.col_span(a), q.col_span(b));
            worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
        }
    }
    return worst;
}

} // namespace

TEST_CASE("orthonormalization of a full-rank sample") {
    auto gen = testutil::rng(7);
    const Matrix y = testutil::random_matrix(20, 8, gen);
    const ReducedBasis b = orthonormalize(y);
    CHECK(b.m == 20);
    CHECK(b.ell == 8);
    CHECK(b.provenance == BasisProvenance::MessQr);
    CHECK(b.dropped_columns.empty());
    CHECK(max_gram_deviation(b.q) <= 1e-12);

    // the basis spans the input: reconstruction is exact to roundoff
    for (std::size_t j = 0; j < y.cols(); ++j) {
        const std::vector<double> xhat = project(b, y.col_span(j));
        double err = 0.0;
        for (std::size_t i = 0; i < y.rows(); ++i) {
            err += (xhat[i] - y(i, j)) * (xhat[i] - y(i, j));
        }
        CHECK(std::sqrt(err) <= 1e-10 * euclidean_norm(y.col_span(j)));
    }
}

TEST_CASE("rank-deficient columns are dropped in order") {
    auto gen = testutil::rng(8);
    Matrix y(10, 4);
    const Matrix ab = testutil::random_matrix(10, 2, gen);
    for (std::size_t i = 0; i < 10; ++i) {
        y(i, 0) = ab(i, 0);
        y(i, 1) = ab(i, 1);
        y(i, 2) = 0.5 * ab(i, 0) - 2.0 * ab(i, 1); // dependent
        y(i, 3) = std::sin(static_cast<double>(i) + 1.0);
    }
    const ReducedBasis b = orthonormalize(y);
    CHECK(b.ell == 3);
    CHECK(b.dropped_columns == std::vector<std::size_t>{2});
    CHECK(max_gram_deviation(b.q) <= 1e-12);

    Matrix with_zero(5, 3, 0.0);
    with_zero(0, 1) = 1.0;
    with_zero(2, 2) = 2.0;
    const ReducedBasis bz = orthonormalize(with_zero);
    CHECK(bz.ell == 2);
    CHECK(bz.dropped_columns == std::vector<std::size_t>{0});

    CHECK_THROWS_AS(orthonormalize(Matrix(4, 3, 0.0)), DegenerateInputError);
    CHECK_THROWS_AS(orthonormalize(y, 0.0), ParameterError);
    CHECK_THROWS_AS(orthonormalize(Matrix{}), ValidationError);
}

TEST_CASE("near-dependent columns respect the rank tolerance") {
    auto gen = testutil::rng(9);
    Matrix y(12, 2);
    const Matrix a = testutil::random_matrix(12, 1, gen);
    for (std::size_t i = 0; i < 12; ++i) {
        y(i, 0) = a(i, 0);
        y(i, 1) = a(i, 0) * (1.0 + 1e-15); // parallel to machine precision
    }
    CHECK(orthonormalize(y, 1e-12).ell == 1);
    // a loose tolerance drops more aggressively, a strict one keeps noise
    Matrix noisy = y;
    noisy(0, 1) += 1e-6 * euclidean_norm(y.col_span(0));
    CHECK(orthonormalize(noisy, 1e-12).ell == 2);
    CHECK(orthonormalize(noisy, 1e-3).ell == 1);
}

TEST_CASE("projection is idempotent, non-expansive, and checked") {
    auto gen = testutil::rng(10);
    const Matrix y = testutil::random_matrix(15, 4, gen);
    const ReducedBasis b = orthonormalize(y);

    const Matrix probes = testutil::random_matrix(15, 6, gen);
    for (std::size_t j = 0; j < probes.cols(); ++j) {
        const std::vector<double> once = project(b, probes.col_span(j));
        const std::vector<double> twice = project(b, once);
        double drift = 0.0;
        double residual_dot = 0.0;
        for (std::size_t i = 0; i < once.size(); ++i) {
            drift = std::max(drift, std::abs(twice[i] - once[i]));
            residual_dot += (probes(i, j) - once[i]) * once[i];
        }
        CHECK(drift <= 1e-12);
        CHECK(std::abs(residual_dot) <=
              1e-10 * euclidean_norm(probes.col_span(j)));
        CHECK(euclidean_norm(once) <=
              euclidean_norm(probes.col_span(j)) * (1.0 + 1e-12));
    }

    const std::vector<double> wrong(14, 0.0);
    CHECK_THROWS_AS(project(b, wrong), ParameterError);
}

TEST_CASE("reconstruction errors against a longhand two-vector projector") {
    // Points on a parabola in the plane, basis built from two of them.
    // The projector is recomputed here step by step, independently of the
    // library's loops.
    const std::size_t n = 5;
    Matrix x(2, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double t = static_cast<double>(j) - 2.0;
        x(0, j) = t;
        x(1, j) = t * t;
    }
    std::vector<std::size_t> picks{0, 3};
    const Matrix sel = x.select_columns(picks);
    const ReducedBasis b = orthonormalize(sel);
    REQUIRE(b.ell == 2);

    // longhand modified Gram-Schmidt on the two selected columns
    double q1[2] = {sel(0, 0), sel(1, 0)};
    const double n1 = std::hypot(q1[0], q1[1]);
    q1[0] /= n1;
    q1[1] /= n1;
    double q2[2] = {sel(0, 1), sel(1, 1)};
    const double c = q2[0] * q1[0] + q2[1] * q1[1];
    q2[0] -= c * q1[0];
    q2[1] -= c * q1[1];
    const double n2 = std::hypot(q2[0], q2[1]);
    q2[0] /= n2;
    q2[1] /= n2;

    const ErrorReport rep = reconstruction_errors(x, b, 0.5);
    REQUIRE(rep.per_snapshot.size() == n);
    double expected_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double a1 = x(0, j) * q1[0] + x(1, j) * q1[1];
        const double a2 = x(0, j) * q2[0] + x(1, j) * q2[1];
        const double rx = x(0, j) - a1 * q1[0] - a2 * q2[0];
        const double ry = x(1, j) - a1 * q1[1] - a2 * q2[1];
        const double expected = std::hypot(rx, ry);
        CHECK(rep.per_snapshot[j] == doctest::Approx(expected).epsilon(1e-12));
        expected_max = std::max(expected_max, expected);
    }
    CHECK(rep.max_abs == doctest::Approx(expected_max).epsilon(1e-12));
    CHECK(rep.eps_abs == 0.5);
    CHECK(rep.max_rel ==
          doctest::Approx(expected_max / diameter(x)).epsilon(1e-12));
}

TEST_CASE("error report normalization options") {
    auto gen = testutil::rng(12);
    const Matrix x = testutil::random_matrix(9, 14, gen);
    const ReducedBasis b = orthonormalize(x.select_columns(
        std::vector<std::size_t>{0, 5, 9}));

    const ErrorReport by_diam =
        reconstruction_errors(x, b, 1.0, RelativeErrorNorm::Diameter);
    CHECK(by_diam.max_rel ==
          doctest::Approx(by_diam.max_abs / diameter(x)).epsilon(1e-12));

    const ErrorReport by_frob =
        reconstruction_errors(x, b, 1.0, RelativeErrorNorm::FrobeniusNorm);
    double frob = 0.0;
    for (double v : x.storage()) frob += v * v;
    frob = std::sqrt(frob);
    CHECK(frobenius_norm(x) == doctest::Approx(frob).epsilon(1e-14));
    CHECK(by_frob.max_rel ==
          doctest::Approx(by_frob.max_abs / frob).epsilon(1e-12));
    CHECK(by_frob.max_abs == by_diam.max_abs);

    const ErrorReport hinted = reconstruction_errors(
        x, b, 1.0, RelativeErrorNorm::Diameter, 2.0);
    CHECK(hinted.max_rel ==
          doctest::Approx(hinted.max_abs / 2.0).epsilon(1e-14));

    const Matrix wrong_dim(8, 3, 1.0);
    CHECK_THROWS_AS(reconstruction_errors(wrong_dim, b, 1.0), ParameterError);
}

TEST_CASE("per-snapshot error never exceeds the distance to a spanning column") {
    auto gen = testutil::rng(13);
    const Matrix x = testutil::random_matrix(8, 40, gen);
    std::vector<std::size_t> picks{0, 7, 19, 33};
    const ReducedBasis b = orthonormalize(x.select_columns(picks));
    const ErrorReport rep = reconstruction_errors(x, b, 1.0);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        double nearest = 1e300;
        for (std::size_t s : picks) {
            nearest = std::min(nearest, euclidean_distance(x.col_span(j),
                                                           x.col_span(s)));
        }
        CHECK(rep.per_snapshot[j] <= nearest * (1.0 + 1e-9) + 1e-12);
    }
}
