#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mess/basis.hpp"
#include "mess/datagen.hpp"
#include "mess/errors.hpp"

#include "testutil.hpp"

using namespace mess;

namespace {

// Scalar two-species kinetics used as an independent cross-check of the
// integrator when diffusion is switched off.
struct CellState {
    double u;
    double v;
};

CellState cell_rhs(CellState s) {
    return {1.0 + s.u * s.u * s.v - 4.0 * s.u, 3.0 * s.u - s.u * s.u * s.v};
}

CellState integrate_cell(CellState s, double t_end, double dt) {
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
    const double h = t_end / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const CellState k1 = cell_rhs(s);
        const CellState k2 = cell_rhs({s.u + 0.5 * h * k1.u, s.v + 0.5 * h * k1.v});
        const CellState k3 = cell_rhs({s.u + 0.5 * h * k2.u, s.v + 0.5 * h * k2.v});
        const CellState k4 = cell_rhs({s.u + h * k3.u, s.v + h * k3.v});
        s.u += h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
        s.v += h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    }
    return s;
}

} // namespace

TEST_CASE("config validation") {
    BrusselatorConfig cfg;
    CHECK_NOTHROW(validate_brusselator_config(cfg));
    cfg.grid_points = 0;
    CHECK_THROWS_AS(validate_brusselator_config(cfg), ParameterError);
    cfg = {};
    cfg.alpha = -0.1;
    CHECK_THROWS_AS(validate_brusselator_config(cfg), ParameterError);
    cfg = {};
    cfg.t_end = -1.0;
    CHECK_THROWS_AS(validate_brusselator_config(cfg), ParameterError);
    cfg = {};
    cfg.n_snapshots = 1;
    CHECK_THROWS_AS(validate_brusselator_config(cfg), ParameterError);
    cfg = {};
    cfg.dt_internal = 0.0;
    CHECK_THROWS_AS(validate_brusselator_config(cfg), ParameterError);
    cfg = {};
    cfg.t_end = 1.0;
    cfg.n_snapshots = 100;
    cfg.dt_internal = 0.5; // coarser than the snapshot spacing
    CHECK_THROWS_AS(validate_brusselator_config(cfg), ParameterError);

    cfg = {};
    cfg.alpha = 0.0; // allowed for the raw integrator entry point only
    CHECK_NOTHROW(validate_brusselator_config(cfg));
    CHECK_THROWS_AS(gen_brusselator(cfg), ParameterError);
}

TEST_CASE("initial state holds the sine profile on interior nodes") {
    const std::size_t n_nodes = 7;
    const std::vector<double> y0 = brusselator_initial_state(n_nodes);
    REQUIRE(y0.size() == 2 * n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double x = static_cast<double>(i + 1) /
                         (static_cast<double>(n_nodes) + 1.0);
        CHECK(y0[2 * i] ==
              doctest::Approx(1.0 + std::sin(2.0 * std::numbers::pi * x))
                  .epsilon(1e-15));
        CHECK(y0[2 * i + 1] == 3.0);
    }
    CHECK_THROWS_AS(brusselator_initial_state(0), ParameterError);
}

TEST_CASE("zero final time yields snapshots of the initial state") {
    BrusselatorConfig cfg;
    cfg.grid_points = 2;
    cfg.t_end = 0.0;
    cfg.n_snapshots = 4;
    const Matrix x = gen_brusselator(cfg);
    REQUIRE(x.rows() == 4);
    REQUIRE(x.cols() == 4);
    const std::vector<double> y0 = brusselator_initial_state(2);
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(x(i, j) == y0[i]);
        }
    }
}

TEST_CASE("generation is deterministic") {
    BrusselatorConfig cfg;
    cfg.grid_points = 6;
    cfg.t_end = 0.5;
    cfg.n_snapshots = 11;
    cfg.dt_internal = 0.01;
    CHECK(gen_brusselator(cfg) == gen_brusselator(cfg));
}

TEST_CASE("integrator matches an independent scalar reference without diffusion") {
    // With alpha = 0 every node follows the same two-species kinetics, so a
    // scalar RK4 at a much finer step is an independent oracle.
    BrusselatorConfig cfg;
    cfg.grid_points = 3;
    cfg.alpha = 0.0;
    cfg.t_end = 2.0;
    cfg.n_snapshots = 5;
    cfg.dt_internal = 0.02;

    std::vector<double> y0(6);
    const CellState start[3] = {{1.2, 3.0}, {0.7, 2.5}, {2.0, 1.0}};
    for (std::size_t i = 0; i < 3; ++i) {
        y0[2 * i] = start[i].u;
        y0[2 * i + 1] = start[i].v;
    }
    const Matrix x = integrate_brusselator(cfg, y0, 1.0, 3.0);
    for (std::size_t i = 0; i < 3; ++i) {
        const CellState ref = integrate_cell(start[i], cfg.t_end, 1e-4);
        CHECK(x(2 * i, 4) == doctest::Approx(ref.u).epsilon(1e-7));
        CHECK(x(2 * i + 1, 4) == doctest::Approx(ref.v).epsilon(1e-7));
    }

    std::vector<double> wrong(4, 1.0);
    CHECK_THROWS_AS(integrate_brusselator(cfg, wrong, 1.0, 3.0),
                    ParameterError);
}

TEST_CASE("integrator reports blow-ups with their position") {
    BrusselatorConfig cfg;
    cfg.grid_points = 2;
    cfg.t_end = 1.0;
    cfg.n_snapshots = 5;
    cfg.dt_internal = 0.05;
    std::vector<double> huge(4, 1e160); // u^2 v overflows immediately
    CHECK_THROWS_WITH_AS(integrate_brusselator(cfg, huge, 1.0, 3.0),
                         doctest::Contains("blew up"), NumericalError);
}

TEST_CASE("diffusion pulls neighboring cells together") {
    BrusselatorConfig cfg;
    cfg.grid_points = 8;
    cfg.alpha = 0.05;
    cfg.t_end = 1.0;
    cfg.n_snapshots = 3;
    cfg.dt_internal = 0.01;
    const Matrix x = gen_brusselator(cfg);
    CHECK(x.all_finite());
    // boundary-adjacent u values drift toward the boundary value 1
    const std::size_t last = x.cols() - 1;
    double spread0 = 0.0;
    double spread1 = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
        spread0 = std::max(spread0, std::abs(x(2 * i, 0) - 1.0));
        spread1 = std::max(spread1, std::abs(x(2 * i, last) - 1.0));
    }
    CHECK(spread1 < spread0 * 2.0); // sanity: no runaway growth
}

TEST_CASE("random walk generation") {
    const Matrix x = gen_random_walk(5, 20, 0.5, 99);
    REQUIRE(x.rows() == 5);
    REQUIRE(x.cols() == 20);
    for (std::size_t i = 0; i < 5; ++i) CHECK(x(i, 0) == 0.0);
    CHECK(x.all_finite());
    CHECK(x == gen_random_walk(5, 20, 0.5, 99));
    CHECK_FALSE(x == gen_random_walk(5, 20, 0.5, 100));

    const Matrix frozen = gen_random_walk(3, 7, 0.0, 1);
    for (double v : frozen.storage()) CHECK(v == 0.0);

    CHECK_THROWS_AS(gen_random_walk(0, 5, 1.0, 0), ParameterError);
    CHECK_THROWS_AS(gen_random_walk(5, 0, 1.0, 0), ParameterError);
    CHECK_THROWS_AS(gen_random_walk(5, 5, -1.0, 0), ParameterError);

    // consecutive increments are independent of position: steps accumulate
    double step_sq = 0.0;
    for (std::size_t j = 1; j < 20; ++j) {
        step_sq += std::pow(
            euclidean_distance(x.col_span(j), x.col_span(j - 1)), 2.0);
    }
    CHECK(step_sq > 0.0);
}

TEST_CASE("galerkin demo with a square basis reproduces the full model") {
    BrusselatorConfig cfg;
    cfg.grid_points = 2;
    cfg.alpha = 0.02;
    cfg.t_end = 1.0;
    cfg.n_snapshots = 6;
    cfg.dt_internal = 0.02;

    // a full-dimensional orthonormal basis makes Q Q^T the identity, so the
    // reduced dynamics must match the full model to integrator precision
    auto gen = testutil::rng(31);
    const ReducedBasis full_basis =
        orthonormalize(testutil::random_matrix(4, 4, gen));
    REQUIRE(full_basis.ell == 4);

    const RomTrajectories rom = galerkin_rom_demo(cfg, full_basis);
    REQUIRE(rom.times.size() == 6);
    CHECK(rom.times.front() == 0.0);
    CHECK(rom.times.back() == 1.0);
    CHECK(rom.times[1] == doctest::Approx(0.2).epsilon(1e-15));
    REQUIRE(rom.full.cols() == 6);
    REQUIRE(rom.lifted.cols() == 6);
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(euclidean_distance(rom.full.col_span(j), rom.lifted.col_span(j)) <=
              1e-9);
    }

    ReducedBasis wrong = full_basis;
    wrong.m = 6;
    CHECK_THROWS_AS(galerkin_rom_demo(cfg, wrong), ParameterError);
}
