#ifndef MESS_DATAGEN_HPP
#define MESS_DATAGEN_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mess/basis.hpp"
#include "mess/matrix.hpp"

namespace mess {

/// 1-D Brusselator reaction-diffusion problem, discretized by second-order
/// finite differences on grid_points interior nodes of (0, 1) and integrated
/// with fixed-step classical RK4. State layout is interleaved:
/// (u_1, v_1, u_2, v_2, ...), so the snapshot dimension is 2 * grid_points.
struct BrusselatorConfig {
    std::size_t grid_points = 100;
    double alpha = 0.02;
    double t_end = 10.0;
    std::size_t n_snapshots = 500;
    /// Upper bound on the internal step; the step is further capped by a
    /// diffusion stability guard and divided evenly between snapshot times.
    double dt_internal = 5e-4;
};

void validate_brusselator_config(const BrusselatorConfig& cfg);

/// Interleaved initial state: u(x) = 1 + sin(2 pi x), v(x) = 3 at the
/// interior nodes x_i = i / (grid_points + 1).
std::vector<double> brusselator_initial_state(std::size_t grid_points);

/// Integrates from an arbitrary interleaved state with Dirichlet boundary
/// values (u_bc, v_bc) held at both ends. alpha = 0 degenerates to
/// independent well-mixed cells, which is useful for cross-checking the
/// integrator. Returns the n_snapshots states at equispaced times in
/// [0, t_end]; t_end = 0 yields copies of the initial state.
Matrix integrate_brusselator(const BrusselatorConfig& cfg,
                             std::span<const double> y0, double u_bc,
                             double v_bc);

/// integrate_brusselator with the standard initial state and boundary
/// values (1, 3).
Matrix gen_brusselator(const BrusselatorConfig& cfg);

/// Gaussian random walk: column 0 is zero, each later column adds
/// step_scale * N(0, 1) noise per entry. Deterministic in the seed.
Matrix gen_random_walk(std::size_t m, std::size_t n, double step_scale,
                       std::uint64_t seed);

struct RomTrajectories {
    std::vector<double> times;
    Matrix full;   ///< full-order solution, one column per time
    Matrix lifted; ///< Q z(t) from the Galerkin-reduced system, same times
};

/// Runs the full-order model and the Galerkin reduction z' = Q^T f(Q z)
/// side by side from the same initial condition, with z0 = Q^T y0.
RomTrajectories galerkin_rom_demo(const BrusselatorConfig& cfg,
                                  const ReducedBasis& basis);

} // namespace mess

#endif
