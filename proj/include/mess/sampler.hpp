#ifndef MESS_SAMPLER_HPP
#define MESS_SAMPLER_HPP

#include <cstdint>
#include <functional>
#include <optional>

#include "mess/metrics.hpp"

namespace mess {

/// How a recurrence radius is specified.
enum class EpsilonMode {
    Absolute,           ///< value is the radius itself
    RelativeToDiameter, ///< value is a fraction in (0,1) of the sample diameter
};

struct EpsilonRule {
    EpsilonMode mode = EpsilonMode::Absolute;
    double value = 0.0;

    static EpsilonRule absolute(double radius) {
        return {EpsilonMode::Absolute, radius};
    }
    static EpsilonRule relative(double fraction) {
        return {EpsilonMode::RelativeToDiameter, fraction};
    }
};

/// Throws ParameterError if the rule is out of range.
void validate_epsilon_rule(const EpsilonRule& rule);

/// Resolves a rule to an absolute radius for the given snapshots.
/// A relative rule on a zero-diameter sample is a DegenerateInputError.
double resolve_epsilon(const EpsilonRule& rule, const Matrix& x,
                       int threads = 1);

/// Plateau interruption rule: sampling may stop once the potential changes
/// by less than potential_tol for `window` consecutive steps. window = 1
/// reproduces the single-step criterion; larger windows guard against
/// spurious stops on noisy potentials.
struct StopConfig {
    double potential_tol = 1e-3;
    std::size_t window = 10;
    bool enabled = false;

    static StopConfig disabled() { return {}; }
};

void validate_stop_config(const StopConfig& stop);

/// Which trace signal detect_plateau watches.
enum class PlateauSignal {
    Potential,        ///< |v_{j+1} - v_j| < tol
    DynamicalEntropy, ///< |h_{j+1} - h_j| < tol
};

/// Feeds successive signal values and reports the first completed run of
/// `window` consecutive sub-tolerance differences. Step k (1-based) is the
/// difference between the k-th and (k+1)-th pushed values; the reported
/// index is the first step of the run.
class PlateauDetector {
public:
    explicit PlateauDetector(const StopConfig& stop);

    void push(double value);
    std::optional<std::size_t> triggered_at() const noexcept { return hit_; }

private:
    double tol_;
    std::size_t window_;
    double prev_ = 0.0;
    bool have_prev_ = false;
    std::size_t run_ = 0;
    std::size_t step_ = 0;
    std::optional<std::size_t> hit_;
};

/// Outcome of a sampling pass.
///
/// `selected` are 0-based column indices, strictly increasing, always
/// starting with column 0. Selected columns are pairwise at least
/// epsilon_abs apart, and while sampling is active every rejected column
/// lies strictly within epsilon_abs of an earlier selected one.
///
/// The offline sampler records the exact trace (delta_j counted against
/// all previous columns). The streaming sampler retains only selected
/// columns, so its delta counts only those; that surrogate never exceeds
/// the exact delta_j and the trace is flagged accordingly.
struct SampleResult {
    std::vector<std::size_t> selected;
    Matrix selected_snapshots; ///< the selected columns, in order
    EntropyTrace trace;
    double epsilon_abs = 0.0;
    std::optional<std::size_t> stop_index; ///< 1-based first step of the plateau run
    std::size_t n_seen = 0;
    bool trace_is_surrogate = false;
};

/// Greedy scan over the columns of x: a column is selected iff its
/// distance to every previously selected column is at least eps. Column 0
/// is always selected. When the stop rule fires, no further columns are
/// accepted but the trace still covers the whole stream.
SampleResult mess_sample(const Matrix& x, const EpsilonRule& rule,
                         const StopConfig& stop = StopConfig::disabled(),
                         int threads = 1);

/// Pull-based snapshot stream: fill `out` with the next snapshot and
/// return true, or return false once exhausted.
using SnapshotStream = std::function<bool(std::vector<double>& out)>;

/// Streaming variant holding only the selected columns in memory. The
/// selected set matches mess_sample at the same absolute radius; the
/// trace is the documented surrogate.
SampleResult mess_sample_streaming(const SnapshotStream& next, double eps_abs,
                                   const StopConfig& stop = StopConfig::disabled());

/// Adapts a matrix to a SnapshotStream over its columns.
SnapshotStream matrix_stream(const Matrix& x);

/// True iff all pairwise column distances are >= eps (a distance exactly
/// eps counts as separated). Equivalent to the entropy trace of these
/// columns being strictly increasing.
bool verify_max_entropy(const Matrix& x_sel, double eps_abs, int threads = 1);

/// Smallest 1-based step j such that the signal differences at steps
/// j .. j+window-1 all stay below the tolerance; nullopt when no such run
/// exists.
std::optional<std::size_t> detect_plateau(
    const EntropyTrace& trace, const StopConfig& stop,
    PlateauSignal signal = PlateauSignal::Potential);

/// Guaranteed back-projection horizon for a plateau (j*, v*): i_max is the
/// largest i >= 0 with i(1 - v*) < j* v* - (1 - v*)/2. Unbounded when
/// v* = 1. When not even i = 1 qualifies, i_max is 0 and
/// no_guaranteed_horizon is set.
struct HorizonEstimate {
    std::size_t j_star = 0;
    double v_star = 0.0;
    bool unbounded = false;
    std::uint64_t i_max = 0;
    bool no_guaranteed_horizon = false;
};

HorizonEstimate horizon_bound(std::size_t j_star, double v_star);

/// The horizon inequality itself, shared by horizon_bound and its tests.
inline bool horizon_holds(std::uint64_t i, std::size_t j_star,
                          double v_star) noexcept {
    const double lhs = static_cast<double>(i) * (1.0 - v_star);
    const double rhs =
        static_cast<double>(j_star) * v_star - 0.5 * (1.0 - v_star);
    return lhs < rhs;
}

} // namespace mess

#endif
