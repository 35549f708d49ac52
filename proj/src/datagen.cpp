#include "mess/datagen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mess/errors.hpp"

namespace mess {

namespace {

constexpr double kReactionRateBound = 12.0;

struct BrusselatorRhs {
    std::size_t nodes;
    double diff; // alpha * (grid_points + 1)^2
    double u_bc;
    double v_bc;

    void operator()(std::span<const double> y, std::span<double> dy) const {
        for (std::size_t i = 0; i < nodes; ++i) {
            const double u = y[2 * i];
            const double v = y[2 * i + 1];
            const double ul = i > 0 ? y[2 * (i - 1)] : u_bc;
            const double ur = i + 1 < nodes ? y[2 * (i + 1)] : u_bc;
            const double vl = i > 0 ? y[2 * (i - 1) + 1] : v_bc;
            const double vr = i + 1 < nodes ? y[2 * (i + 1) + 1] : v_bc;
            const double uuv = u * u * v;
            dy[2 * i] = 1.0 + uuv - 4.0 * u + diff * (ul - 2.0 * u + ur);
            dy[2 * i + 1] = 3.0 * u - uuv + diff * (vl - 2.0 * v + vr);
        }
    }
};

template <typename Rhs>
class Rk4Stepper {
public:
    explicit Rk4Stepper(std::size_t dim, Rhs rhs)
        : rhs_(std::move(rhs)), k1_(dim), k2_(dim), k3_(dim), k4_(dim),
          tmp_(dim) {}

    void step(std::vector<double>& y, double h) {
        const std::size_t d = y.size();
        rhs_(y, k1_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
        rhs_(tmp_, k2_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
        rhs_(tmp_, k3_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + h * k3_[i];
        rhs_(tmp_, k4_);
        for (std::size_t i = 0; i < d; ++i) {
            y[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
    }

private:
    Rhs rhs_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

bool all_finite(std::span<const double> y) {
    for (double v : y) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

[[noreturn]] void throw_blowup(const char* what, double t, std::size_t step) {
    std::ostringstream msg;
    msg << what << " at t = " << t << " (step " << step << ")";
    throw NumericalError(msg.str());
}

double effective_step(const BrusselatorConfig& cfg) {
    const double np1 = static_cast<double>(cfg.grid_points) + 1.0;
    const double guard =
        0.4 / (2.0 * cfg.alpha * np1 * np1 + kReactionRateBound);
    return std::min(cfg.dt_internal, guard);
}

std::vector<double> snapshot_times(const BrusselatorConfig& cfg) {
    std::vector<double> times(cfg.n_snapshots, 0.0);
    const double dt = cfg.t_end / static_cast<double>(cfg.n_snapshots - 1);
    for (std::size_t k = 0; k < cfg.n_snapshots; ++k) {
        times[k] = static_cast<double>(k) * dt;
    }
    times.back() = cfg.t_end;
    return times;
}

// Advances y across one inter-snapshot interval, splitting it into equal
// sub-steps no longer than dt_max.
template <typename Rhs>
void advance(Rk4Stepper<Rhs>& stepper, std::vector<double>& y, double t0,
             double interval, double dt_max, std::size_t& step_count,
             const char* blowup_what) {
    const auto nsub = static_cast<std::size_t>(
        std::max(1.0, std::ceil(interval / dt_max)));
    const double h = interval / static_cast<double>(nsub);
    for (std::size_t s = 0; s < nsub; ++s) {
        stepper.step(y, h);
        ++step_count;
        if (!all_finite(y)) {
            throw_blowup(blowup_what, t0 + static_cast<double>(s + 1) * h,
                         step_count);
        }
    }
}

} // namespace

void validate_brusselator_config(const BrusselatorConfig& cfg) {
    if (cfg.grid_points < 1) {
        throw ParameterError("grid_points must be at least 1");
    }
    if (!std::isfinite(cfg.alpha) || cfg.alpha < 0.0) {
        throw ParameterError("alpha must be finite and non-negative");
    }
    if (!std::isfinite(cfg.t_end) || cfg.t_end < 0.0) {
        throw ParameterError("t_end must be finite and non-negative");
    }
    if (cfg.n_snapshots < 2) {
        throw ParameterError("n_snapshots must be at least 2");
    }
    if (!std::isfinite(cfg.dt_internal) || cfg.dt_internal <= 0.0) {
        throw ParameterError("dt_internal must be a finite positive number");
    }
    if (cfg.t_end > 0.0 &&
        cfg.dt_internal > cfg.t_end / static_cast<double>(cfg.n_snapshots)) {
        throw ParameterError(
            "dt_internal must not exceed t_end / n_snapshots");
    }
}

std::vector<double> brusselator_initial_state(std::size_t grid_points) {
    if (grid_points < 1) {
        throw ParameterError("grid_points must be at least 1");
    }
    std::vector<double> y(2 * grid_points);
    const double dx = 1.0 / (static_cast<double>(grid_points) + 1.0);
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double x = static_cast<double>(i + 1) * dx;
        y[2 * i] = 1.0 + std::sin(2.0 * std::numbers::pi * x);
        y[2 * i + 1] = 3.0;
    }
    return y;
}

Matrix integrate_brusselator(const BrusselatorConfig& cfg,
                             std::span<const double> y0, double u_bc,
                             double v_bc) {
    validate_brusselator_config(cfg);
    const std::size_t dim = 2 * cfg.grid_points;
    if (y0.size() != dim) {
        std::ostringstream msg;
        msg << "initial state length " << y0.size() << " does not match 2 * "
            << cfg.grid_points;
        throw ParameterError(msg.str());
    }
    if (!all_finite(y0) || !std::isfinite(u_bc) || !std::isfinite(v_bc)) {
        throw ValidationError("initial state and boundary values must be finite");
    }

    Matrix snapshots(dim, cfg.n_snapshots);
    std::vector<double> y(y0.begin(), y0.end());
    for (std::size_t i = 0; i < dim; ++i) snapshots(i, 0) = y[i];
    if (cfg.t_end == 0.0) {
        for (std::size_t k = 1; k < cfg.n_snapshots; ++k) {
            for (std::size_t i = 0; i < dim; ++i) snapshots(i, k) = y[i];
        }
        return snapshots;
    }

    const BrusselatorRhs rhs{cfg.grid_points,
                             cfg.alpha *
                                 (static_cast<double>(cfg.grid_points) + 1.0) *
                                 (static_cast<double>(cfg.grid_points) + 1.0),
                             u_bc, v_bc};
    Rk4Stepper<BrusselatorRhs> stepper(dim, rhs);
    const double dt_max = effective_step(cfg);
    const std::vector<double> times = snapshot_times(cfg);
    std::size_t step_count = 0;
    for (std::size_t k = 1; k < cfg.n_snapshots; ++k) {
        advance(stepper, y, times[k - 1], times[k] - times[k - 1], dt_max,
                step_count, "full model solution blew up");
        for (std::size_t i = 0; i < dim; ++i) snapshots(i, k) = y[i];
    }
    return snapshots;
}

Matrix gen_brusselator(const BrusselatorConfig& cfg) {
    validate_brusselator_config(cfg);
    if (cfg.alpha <= 0.0) {
        throw ParameterError("alpha must be positive");
    }
    return integrate_brusselator(cfg, brusselator_initial_state(cfg.grid_points),
                                 1.0, 3.0);
}

Matrix gen_random_walk(std::size_t m, std::size_t n, double step_scale,
                       std::uint64_t seed) {
    if (m < 1 || n < 1) {
        throw ParameterError("random walk dimensions must be at least 1");
    }
    if (!std::isfinite(step_scale) || step_scale < 0.0) {
        throw ParameterError("step_scale must be finite and non-negative");
    }
    Matrix x(m, n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t j = 1; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            x(i, j) = x(i, j - 1) + step_scale * noise(rng);
        }
    }
    return x;
}

namespace {

// Right-hand side of the Galerkin reduction z' = Q^T f(Q z).
struct ReducedRhs {
    const ReducedBasis* basis;
    BrusselatorRhs full;
    mutable std::vector<double> lifted;
    mutable std::vector<double> flift;

    void operator()(std::span<const double> z, std::span<double> dz) const {
        const std::size_t m = basis->m;
        const std::size_t ell = basis->ell;
        lifted.assign(m, 0.0);
        for (std::size_t k = 0; k < ell; ++k) {
            const double* qk = basis->q.col(k);
            const double c = z[k];
            for (std::size_t i = 0; i < m; ++i) lifted[i] += c * qk[i];
        }
        full(lifted, flift);
        for (std::size_t k = 0; k < ell; ++k) {
            const double* qk = basis->q.col(k);
            double c = 0.0;
            for (std::size_t i = 0; i < m; ++i) c += qk[i] * flift[i];
            dz[k] = c;
        }
    }
};

} // namespace

RomTrajectories galerkin_rom_demo(const BrusselatorConfig& cfg,
                                  const ReducedBasis& basis) {
    validate_brusselator_config(cfg);
    if (cfg.alpha <= 0.0) {
        throw ParameterError("alpha must be positive");
    }
    const std::size_t dim = 2 * cfg.grid_points;
    if (basis.m != dim || basis.ell < 1) {
        std::ostringstream msg;
        msg << "basis dimension " << basis.m << " x " << basis.ell
            << " does not fit state dimension " << dim;
        throw ParameterError(msg.str());
    }

    RomTrajectories out;
    out.times = snapshot_times(cfg);
    const std::vector<double> y0 = brusselator_initial_state(cfg.grid_points);
    out.full = integrate_brusselator(cfg, y0, 1.0, 3.0);

    const BrusselatorRhs rhs{cfg.grid_points,
                             cfg.alpha *
                                 (static_cast<double>(cfg.grid_points) + 1.0) *
                                 (static_cast<double>(cfg.grid_points) + 1.0),
                             1.0, 3.0};
    ReducedRhs reduced{&basis, rhs, std::vector<double>(dim),
                       std::vector<double>(dim)};

    std::vector<double> z(basis.ell, 0.0);
    for (std::size_t k = 0; k < basis.ell; ++k) {
        const double* qk = basis.q.col(k);
        double c = 0.0;
        for (std::size_t i = 0; i < dim; ++i) c += qk[i] * y0[i];
        z[k] = c;
    }

    Matrix lifted(dim, cfg.n_snapshots);
    auto store = [&](std::size_t col) {
        std::vector<double> xr(dim, 0.0);
        for (std::size_t k = 0; k < basis.ell; ++k) {
            const double* qk = basis.q.col(k);
            const double c = z[k];
            for (std::size_t i = 0; i < dim; ++i) xr[i] += c * qk[i];
        }
        for (std::size_t i = 0; i < dim; ++i) lifted(i, col) = xr[i];
    };
    store(0);
    if (cfg.t_end > 0.0) {
        Rk4Stepper<ReducedRhs> stepper(basis.ell, std::move(reduced));
        const double dt_max = effective_step(cfg);
        std::size_t step_count = 0;
        for (std::size_t k = 1; k < cfg.n_snapshots; ++k) {
            advance(stepper, z, out.times[k - 1],
                    out.times[k] - out.times[k - 1], dt_max, step_count,
                    "reduced model instability");
            store(k);
        }
    } else {
        for (std::size_t k = 1; k < cfg.n_snapshots; ++k) store(k);
    }
    out.lifted = std::move(lifted);
    return out;
}

} // namespace mess
