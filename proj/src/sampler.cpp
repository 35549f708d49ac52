#include "mess/sampler.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <sstream>
#include <utility>

#include "mess/errors.hpp"
#include "mess/metrics.hpp"

namespace mess {

void validate_epsilon_rule(const EpsilonRule& rule) {
    if (!std::isfinite(rule.value) || rule.value <= 0.0) {
        throw ParameterError("epsilon must be a finite positive number");
    }
    if (rule.mode == EpsilonMode::RelativeToDiameter && rule.value > 1.0) {
        throw ParameterError("relative epsilon must lie in (0, 1]");
    }
}

double resolve_epsilon(const EpsilonRule& rule, const Matrix& x, int threads) {
    validate_epsilon_rule(rule);
    if (rule.mode == EpsilonMode::Absolute) {
        return rule.value;
    }
    const double diam = diameter(x, threads);
    if (diam <= 0.0) {
        throw DegenerateInputError(
            "sample diameter is zero; relative epsilon is undefined");
    }
    return rule.value * diam;
}

void validate_stop_config(const StopConfig& stop) {
    if (!std::isfinite(stop.potential_tol) || stop.potential_tol <= 0.0) {
        throw ParameterError("stop tolerance must be a finite positive number");
    }
    if (stop.window < 1) {
        throw ParameterError("stop window must be at least 1");
    }
}

PlateauDetector::PlateauDetector(const StopConfig& stop)
    : tol_(stop.potential_tol), window_(stop.window) {
    validate_stop_config(stop);
}

void PlateauDetector::push(double value) {
    if (!have_prev_) {
        prev_ = value;
        have_prev_ = true;
        return;
    }
    ++step_;
    const double diff = std::abs(value - prev_);
    prev_ = value;
    if (diff < tol_) {
        ++run_;
        if (run_ >= window_ && !hit_) {
            hit_ = step_ - window_ + 1;
        }
    } else {
        run_ = 0;
    }
}

namespace {

struct ScanOutcome {
    std::size_t recurrent = 0;     // previous columns strictly within eps
    bool near_selected = false;    // some selected column strictly within eps
};

// One pass over columns k < j: distance of column j to each, counting
// recurrences and testing proximity to the selected subset.
ScanOutcome scan_previous(const Matrix& x, std::size_t j, double eps,
                          const std::vector<std::uint8_t>& is_selected,
                          int threads) {
    const std::size_t m = x.rows();
    const double* xj = x.col(j);
    if (threads <= 1 || j < 256) {
        ScanOutcome out;
        for (std::size_t k = 0; k < j; ++k) {
            const double* xk = x.col(k);
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = xj[i] - xk[i];
                s += d * d;
            }
            if (s < eps * eps) {
                ++out.recurrent;
                if (is_selected[k]) out.near_selected = true;
            }
        }
        return out;
    }
    std::atomic<std::size_t> recurrent{0};
    std::atomic<bool> near_selected{false};
    parallel_for(0, j, threads, [&](std::size_t k) {
        const double* xk = x.col(k);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double d = xj[i] - xk[i];
            s += d * d;
        }
        if (s < eps * eps) {
            recurrent.fetch_add(1, std::memory_order_relaxed);
            if (is_selected[k]) near_selected.store(true, std::memory_order_relaxed);
        }
    });
    return {recurrent.load(), near_selected.load()};
}

} // namespace

SampleResult mess_sample(const Matrix& x, const EpsilonRule& rule,
                         const StopConfig& stop, int threads) {
    validate_snapshot_matrix(x);
    if (stop.enabled) validate_stop_config(stop);
    const double eps = resolve_epsilon(rule, x, threads);

    const std::size_t n = x.cols();
    std::vector<std::size_t> selected{0};
    std::vector<std::uint8_t> is_selected(n, 0);
    is_selected[0] = 1;

    EntropyTraceBuilder builder;
    PlateauDetector detector(stop.enabled ? stop : StopConfig{1.0, 1, true});
    if (stop.enabled) detector.push(builder.current_v());

    std::optional<std::size_t> stop_index;
    bool accepting = true;

    for (std::size_t j = 1; j < n; ++j) {
        const ScanOutcome out = scan_previous(x, j, eps, is_selected, threads);
        if (accepting && !out.near_selected) {
            selected.push_back(j);
            is_selected[j] = 1;
        }
        builder.push(out.recurrent);
        if (stop.enabled && accepting) {
            detector.push(builder.current_v());
            if (auto hit = detector.triggered_at()) {
                stop_index = *hit;
                accepting = false;
            }
        }
    }

    SampleResult result;
    result.selected = selected;
    result.selected_snapshots = x.select_columns(selected);
    result.trace = std::move(builder).take();
    result.epsilon_abs = eps;
    result.stop_index = stop_index;
    result.n_seen = n;
    result.trace_is_surrogate = false;
    return result;
}

SnapshotStream matrix_stream(const Matrix& x) {
    validate_snapshot_matrix(x);
    auto next = std::make_shared<std::size_t>(0);
    return [&x, next](std::vector<double>& out) {
        if (*next >= x.cols()) return false;
        const double* c = x.col(*next);
        out.assign(c, c + x.rows());
        ++*next;
        return true;
    };
}

SampleResult mess_sample_streaming(const SnapshotStream& stream, double eps_abs,
                                   const StopConfig& stop) {
    if (!std::isfinite(eps_abs) || eps_abs <= 0.0) {
        throw ParameterError("epsilon must be a finite positive number");
    }
    if (stop.enabled) validate_stop_config(stop);
    if (!stream) throw ParameterError("snapshot stream is empty");

    std::vector<double> buf;
    if (!stream(buf)) {
        throw DegenerateInputError("snapshot stream produced no snapshots");
    }
    const std::size_t m = buf.size();
    if (m == 0) throw StreamError("snapshot 0 has zero length");
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::isfinite(buf[i])) {
            throw ValidationError("snapshot 0 contains a non-finite entry");
        }
    }

    std::vector<double> sel_data(buf);
    std::vector<std::size_t> selected{0};

    EntropyTraceBuilder builder;
    PlateauDetector detector(stop.enabled ? stop : StopConfig{1.0, 1, true});
    if (stop.enabled) detector.push(builder.current_v());

    std::optional<std::size_t> stop_index;
    bool accepting = true;
    const double eps_sq = eps_abs * eps_abs;

    std::size_t seen = 1;
    while (stream(buf)) {
        if (buf.size() != m) {
            std::ostringstream msg;
            msg << "snapshot " << seen << " has length " << buf.size()
                << ", expected " << m;
            throw StreamError(msg.str());
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (!std::isfinite(buf[i])) {
                std::ostringstream msg;
                msg << "snapshot " << seen << " contains a non-finite entry";
                throw ValidationError(msg.str());
            }
        }
        std::size_t near = 0;
        for (std::size_t k = 0; k < selected.size(); ++k) {
            const double* xk = sel_data.data() + k * m;
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = buf[i] - xk[i];
                s += d * d;
            }
            if (s < eps_sq) ++near;
        }
        if (accepting && near == 0) {
            selected.push_back(seen);
            sel_data.insert(sel_data.end(), buf.begin(), buf.end());
        }
        builder.push(near);
        if (stop.enabled && accepting) {
            detector.push(builder.current_v());
            if (auto hit = detector.triggered_at()) {
                stop_index = *hit;
                accepting = false;
            }
        }
        ++seen;
    }

    SampleResult result;
    result.selected = selected;
    result.selected_snapshots =
        Matrix::from_column_major(m, selected.size(), std::move(sel_data));
    result.trace = std::move(builder).take();
    result.epsilon_abs = eps_abs;
    result.stop_index = stop_index;
    result.n_seen = seen;
    result.trace_is_surrogate = true;
    return result;
}

bool verify_max_entropy(const Matrix& x_sel, double eps_abs, int threads) {
    validate_snapshot_matrix(x_sel);
    if (!std::isfinite(eps_abs) || eps_abs <= 0.0) {
        throw ParameterError("epsilon must be a finite positive number");
    }
    const std::size_t n = x_sel.cols();
    std::atomic<bool> violated{false};
    parallel_for(1, n, threads, [&](std::size_t j) {
        if (violated.load(std::memory_order_relaxed)) return;
        for (std::size_t k = 0; k < j; ++k) {
            if (euclidean_distance(x_sel.col_span(j), x_sel.col_span(k)) < eps_abs) {
                violated.store(true, std::memory_order_relaxed);
                return;
            }
        }
    });
    return !violated.load();
}

std::optional<std::size_t> detect_plateau(const EntropyTrace& trace,
                                          const StopConfig& stop,
                                          PlateauSignal signal) {
    validate_stop_config(stop);
    PlateauDetector detector(stop);
    const std::vector<double>& series =
        signal == PlateauSignal::Potential ? trace.v : trace.h;
    for (double value : series) detector.push(value);
    return detector.triggered_at();
}

HorizonEstimate horizon_bound(std::size_t j_star, double v_star) {
    if (j_star < 1) throw ParameterError("plateau index must be at least 1");
    if (!std::isfinite(v_star) || v_star <= 0.0 || v_star > 1.0) {
        throw ParameterError("plateau potential must lie in (0, 1]");
    }
    HorizonEstimate est;
    est.j_star = j_star;
    est.v_star = v_star;
    if (v_star == 1.0) {
        est.unbounded = true;
        return est;
    }
    const double slack = 1.0 - v_star;
    const double rhs = static_cast<double>(j_star) * v_star - 0.5 * slack;
    std::uint64_t i = 0;
    if (rhs > 0.0) {
        i = static_cast<std::uint64_t>(std::floor(rhs / slack));
        while (i > 0 && !horizon_holds(i, j_star, v_star)) --i;
        while (horizon_holds(i + 1, j_star, v_star)) ++i;
    }
    est.i_max = i;
    est.no_guaranteed_horizon = (i == 0);
    return est;
}

} // namespace mess
