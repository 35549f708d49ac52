#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mess/basis.hpp"
#include "mess/errors.hpp"
#include "mess/pod.hpp"

#include "testutil.hpp"

using namespace mess;

namespace {

double reconstruction_gap(const Matrix& x, const SvdFactors& f) {
    double worst = 0.0;
    const std::size_t r = f.sigma.size();
    for (std::size_t j = 0; j < x.cols(); ++j) {
        for (std::size_t i = 0; i < x.rows(); ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < r; ++k) {
                s += f.u(i, k) * f.sigma[k] * f.v(j, k);
            }
            worst = std::max(worst, std::abs(s - x(i, j)));
        }
    }
    return worst;
}

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

double squared_error_sum(const Matrix& x, const ReducedBasis& b) {
    double total = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const std::vector<double> xhat = project(b, x.col_span(j));
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const double d = x(i, j) - xhat[i];
            total += d * d;
        }
    }
    return total;
}

} // namespace

TEST_CASE("economy SVD reconstructs tall and wide matrices") {
    auto gen = testutil::rng(21);
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{17, 9},
                        {9, 17},
                        {6, 6},
                        {1, 5},
                        {5, 1}}) {
        const Matrix x = testutil::random_matrix(m, n, gen);
        const SvdFactors f = svd(x);
        const std::size_t r = std::min(m, n);
        REQUIRE(f.sigma.size() == r);
        CHECK(f.u.rows() == m);
        CHECK(f.u.cols() == r);
        CHECK(f.v.rows() == n);
        CHECK(f.v.cols() == r);
        for (std::size_t k = 1; k < r; ++k) {
            CHECK(f.sigma[k] <= f.sigma[k - 1]);
            CHECK(f.sigma[k] >= 0.0);
        }
        CHECK(max_gram_deviation(f.u) <= 1e-13);
        CHECK(max_gram_deviation(f.v) <= 1e-13);
        CHECK(reconstruction_gap(x, f) <= 1e-12 * std::max(1.0, f.sigma[0]));
    }
    CHECK_THROWS_AS(svd(Matrix{}), ValidationError);
}

TEST_CASE("singular values match a known diagonal case") {
    Matrix x(4, 3, 0.0);
    x(0, 0) = 3.0;
    x(1, 1) = -5.0; // sign lands in the singular vectors
    x(2, 2) = 0.5;
    const SvdFactors f = svd(x);
    CHECK(f.sigma[0] == doctest::Approx(5.0).epsilon(1e-13));
    CHECK(f.sigma[1] == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(f.sigma[2] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("truncation error matches the tail energy identity") {
    auto gen = testutil::rng(22);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t m = 5 + rep;
        const std::size_t n = 4 + (rep * 3) % 9;
        const Matrix x = testutil::random_matrix(m, n, gen);
        const SvdFactors f = svd(x);
        const std::size_t r = f.sigma.size();
        double total = 0.0;
        for (double s : f.sigma) total += s * s;
        for (std::size_t ell = 1; ell <= r; ++ell) {
            const ReducedBasis b = pod_basis(x, BasisSize{ell});
            double tail = 0.0;
            for (std::size_t k = ell; k < r; ++k) tail += f.sigma[k] * f.sigma[k];
            const double sse = squared_error_sum(x, b);
            CHECK(std::abs(sse - tail) <= 1e-10 * std::max(1.0, total));
        }
    }
}

TEST_CASE("pod basis beats random competitors of the same size") {
    auto gen = testutil::rng(23);
    const Matrix x = testutil::random_matrix(12, 9, gen);
    for (std::size_t ell : {1UL, 3UL, 5UL}) {
        const ReducedBasis pod = pod_basis(x, BasisSize{ell});
        const double pod_sse = squared_error_sum(x, pod);
        for (int rep = 0; rep < 10; ++rep) {
            const Matrix raw = testutil::random_matrix(12, ell, gen);
            const ReducedBasis competitor = orthonormalize(raw);
            REQUIRE(competitor.ell == ell);
            CHECK(pod_sse <= squared_error_sum(x, competitor) + 1e-10);
        }
    }
}

TEST_CASE("energy truncation on a hand-checked spectrum") {
    const std::vector<double> sigma{3.0, 2.0, 1.0}; // energies 9, 4, 1
    // eps = 0.5 keeps 75% of the energy: 9 < 10.5 <= 13, so ell = 2
    EnergyTruncation t = truncate_energy(sigma, 0.5);
    CHECK(t.ell == 2);
    CHECK_FALSE(t.reached_rank);
    // a tight target forces the full rank
    t = truncate_energy(sigma, 0.01);
    CHECK(t.ell == 3);
    CHECK(t.reached_rank);
    // a loose target keeps a single mode
    t = truncate_energy(sigma, 0.6);
    CHECK(t.ell == 1);
    CHECK_FALSE(t.reached_rank);

    // trailing zeros do not count toward the rank
    t = truncate_energy(std::vector<double>{2.0, 0.0}, 0.5);
    CHECK(t.ell == 1);
    CHECK(t.reached_rank);

    CHECK_THROWS_AS(truncate_energy(std::vector<double>{0.0, 0.0}, 0.5),
                    DegenerateInputError);
    CHECK_THROWS_AS(truncate_energy(std::vector<double>{1.0, 2.0}, 0.5),
                    ParameterError);
    CHECK_THROWS_AS(truncate_energy(sigma, 0.0), ParameterError);
    CHECK_THROWS_AS(truncate_energy(sigma, 1.0), ParameterError);
    CHECK_THROWS_AS(truncate_energy(std::vector<double>{}, 0.5),
                    ParameterError);
}

TEST_CASE("energy truncation matches a direct cumulative scan") {
    auto gen = testutil::rng(24);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int rep = 0; rep < 25; ++rep) {
        const Matrix x = testutil::random_matrix(10, 8, gen);
        const std::vector<double> sigma = svd(x).sigma;
        const double eps = unit(gen);
        const EnergyTruncation t = truncate_energy(sigma, eps);
        double total = 0.0;
        for (double s : sigma) total += s * s;
        double cum = 0.0;
        std::size_t expected = sigma.size();
        for (std::size_t k = 0; k < sigma.size(); ++k) {
            cum += sigma[k] * sigma[k];
            if (cum >= (1.0 - eps * eps) * total) {
                expected = k + 1;
                break;
            }
        }
        CHECK(t.ell == expected);
    }
}

TEST_CASE("pod basis options and errors") {
    auto gen = testutil::rng(25);
    const Matrix x = testutil::random_matrix(10, 6, gen);
    const SvdFactors f = svd(x);

    const ReducedBasis b = pod_basis(x, BasisSize{3});
    CHECK(b.m == 10);
    CHECK(b.ell == 3);
    CHECK(b.provenance == BasisProvenance::Pod);
    CHECK(b.dropped_columns.empty());
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(b.q(i, k) == f.u(i, k));
        }
    }

    const ReducedBasis be = pod_basis(x, EnergyFraction{0.3});
    CHECK(be.ell == truncate_energy(f.sigma, 0.3).ell);

    CHECK_THROWS_AS(pod_basis(x, BasisSize{0}), ParameterError);
    CHECK_THROWS_AS(pod_basis(x, BasisSize{7}), ParameterError);
    CHECK_THROWS_AS(pod_basis(Matrix(4, 4, 0.0), BasisSize{1}),
                    DegenerateInputError);

    // rank-deficient input: requesting more than the rank is refused
    Matrix low(8, 4);
    const Matrix g = testutil::random_matrix(8, 1, gen);
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t i = 0; i < 8; ++i) {
            low(i, j) = g(i, 0) * static_cast<double>(j + 1);
        }
    }
    CHECK(pod_basis(low, BasisSize{1}).ell == 1);
    CHECK_THROWS_AS(pod_basis(low, BasisSize{2}), ParameterError);
}
