#pragma once

// Forcing paths in C(R, X), the truncated Frechet metric of locally uniform
// convergence, the shift group, finite hull approximations and the forcing
// generators (quasi-periodic sums and the Cantor-surjection bump).

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ndattr/state_space.hpp"

namespace ndattr {

/// A time-sampled X-valued path. Linear interpolation between samples,
/// constant extrapolation outside the grid. Samples are shared between
/// shifted copies; a shift only moves the time origin, so the group law
/// holds exactly.
class SymbolPath {
public:
    SymbolPath() = default;
    SymbolPath(std::vector<double> times, const std::vector<StateVector>& values);

    static SymbolPath constant(const StateVector& value);
    static SymbolPath zero(std::size_t modes) { return constant(StateVector(modes)); }

    [[nodiscard]] std::size_t modes() const noexcept { return data_ ? data_->modes : 0; }
    [[nodiscard]] std::size_t sample_count() const noexcept { return data_ ? data_->times.size() : 0; }
    /// Accumulated shift: this path evaluates the stored samples at s + offset.
    [[nodiscard]] double offset() const noexcept { return offset_; }

    [[nodiscard]] StateVector operator()(double t) const;
    void evaluate_into(double t, std::span<double> out) const;

    /// theta_t p, i.e. s -> p(s + t).
    [[nodiscard]] SymbolPath shifted(double t) const;

    /// Sample times expressed in this path's own time (stored time - offset).
    [[nodiscard]] std::vector<double> breakpoints() const;
    /// Sample times and values as stored (unshifted).
    [[nodiscard]] std::span<const double> stored_times() const;
    [[nodiscard]] StateVector stored_value(std::size_t i) const;

    /// True when both paths are views of the same sample buffer.
    [[nodiscard]] bool shares_samples_with(const SymbolPath& o) const noexcept { return data_ == o.data_; }

private:
    struct Samples {
        std::vector<double> times;
        std::vector<double> values;  // row-major, times.size() x modes
        std::size_t modes = 0;
        bool uniform = false;
        double step = 0.0;
    };
    std::shared_ptr<const Samples> data_;
    double offset_ = 0.0;
};

[[nodiscard]] SymbolPath shift(const SymbolPath& p, double t);

struct FrechetConfig {
    /// Series truncation; the dropped tail is at most 2^-n_max.
    int n_max = 40;
    /// Extra uniform evaluation points per unit time on top of the merged
    /// breakpoints of both paths. Zero evaluates at breakpoints and window
    /// edges only, which is already exact for piecewise-linear paths.
    int samples_per_unit = 8;
};

/// d^(n)(p, q) = max over s in [-n, n] of |p(s) - q(s)|_X for n = 0..n_max.
[[nodiscard]] std::vector<double> window_sup_distances(const SymbolPath& p, const SymbolPath& q,
                                                       const FrechetConfig& cfg = {});
/// sum_{n=0}^{n_max} 2^-n d^(n) / (1 + d^(n)); always < 2.
[[nodiscard]] double frechet_dist(const SymbolPath& p, const SymbolPath& q, const FrechetConfig& cfg = {});
/// frechet_dist(p, q) <= r (with kCoverSlack), decided with early exit on
/// the partial sums.
[[nodiscard]] bool frechet_within(const SymbolPath& p, const SymbolPath& q, double r,
                                  const FrechetConfig& cfg = {});

/// Symmetric Hausdorff distance between two finite path sets.
[[nodiscard]] double frechet_hausdorff(std::span<const SymbolPath> a, std::span<const SymbolPath> b,
                                       const FrechetConfig& cfg = {});

struct DrivingLipschitz {
    double P = 2.0;
    double zeta = 0.0;            // log 2 by default
    bool holds = true;            // d(theta_t p, theta_t q) <= P e^{zeta t} d(p, q) on the sample
    double worst_ratio = 0.0;     // max of measured / envelope
    double max_growth = 0.0;      // max of d(theta_t p, theta_t q) / d(p, q)
    std::size_t pairs = 0;
};

/// Verifies the shift-semigroup Lipschitz envelope P e^{zeta t} with the
/// analytic constants P = 2, zeta = log 2 over all distinct sampled pairs
/// and t in t_grid (default 0, 0.5, ..., 10).
[[nodiscard]] DrivingLipschitz estimate_driving_lipschitz(const FrechetConfig& cfg,
                                                          std::span<const SymbolPath> paths,
                                                          std::vector<double> t_grid = {});

struct HullApproximation {
    SymbolPath source;
    std::vector<double> shifts;
    std::vector<SymbolPath> paths;
    FrechetConfig metric;

    [[nodiscard]] std::size_t size() const noexcept { return paths.size(); }
};

/// Shifts -T, -T + d, ..., T (index-based, so every value is -T + i d).
[[nodiscard]] HullApproximation build_hull(const SymbolPath& g, double extent, double resolution,
                                           const FrechetConfig& cfg = {});

enum class Direction { Backward, Forward };

struct LimitSetOptions {
    /// Width of the tail window as a fraction of the hull extent.
    double window_fraction = 0.25;
    double tolerance = 1e-6;
};

/// Tail window of shifts near +T (Forward, omega-limit) or -T (Backward,
/// alpha-limit), accepted once it lies within tolerance (Hausdorff, Frechet
/// metric) of the adjacent window further in. Throws NonConvergenceError
/// otherwise.
[[nodiscard]] HullApproximation estimate_limit_sets(const HullApproximation& h, Direction direction,
                                                    const LimitSetOptions& opts = {});

/// g(t) = sum_j a_j sin(w_j t) sampled at t_min + i * step.
[[nodiscard]] SymbolPath make_quasiperiodic(std::span<const double> frequencies,
                                            std::span<const StateVector> amplitudes, double t_min,
                                            double t_max, double step);

using CantorSampler = std::function<StateVector(std::size_t address)>;

/// Left endpoint of the depth-D Cantor interval with the given binary
/// address (most significant bit = first ternary digit).
[[nodiscard]] double cantor_address_point(std::size_t address, int depth);

/// Bump path: piecewise-linear extension of the depth-D Cantor map on
/// [0, 1] (constant on each depth-D interval, linear across removed gaps),
/// ramps (1 + t) alpha(0) on [-1, 0] and (2 - t) alpha(1) on [1, 2], zero
/// outside [-1, 2].
[[nodiscard]] SymbolPath make_cantor_forcing(const CantorSampler& sampler, int depth);

/// Points of the Y unit ball indexed by D-bit addresses: coefficient k is
/// b_k / sqrt(D lambda_k) for k <= D. Requires disc.modes() >= depth.
[[nodiscard]] CantorSampler y_ball_indicator_sampler(const SpatialDiscretization& disc, int depth);

/// Largest |p(t_{i+1}) - p(t_i)| over the uniform grid t0, t0 + step, ..., t1.
[[nodiscard]] double modulus_on_grid(const SymbolPath& p, double t0, double t1, double step);

struct ExponentialCloseness {
    double Q1 = 1.0, eta1 = 1.0;  // |g - g_-| <= Q1 e^{eta1 t} for t <= 0
    double Q2 = 1.0, eta2 = 1.0;  // |g - g_+| <= Q2 e^{-eta2 t} for t >= 0
    bool minus_compact = false;   // difference vanishes beyond the sample tail
    bool plus_compact = false;
    std::size_t samples = 0;
};

struct ClosenessOptions {
    double horizon = 20.0;
    double step = 0.125;
    /// Rate used when the difference is identically zero or compactly
    /// supported, where any positive rate is valid.
    double default_rate = 1.0;
};

/// Least-squares fit of log|g - g_pm| against -+t on each half-line, with
/// the prefactor raised until the envelope holds at every sample. Throws
/// NonConvergenceError when a tail does not decay.
[[nodiscard]] ExponentialCloseness fit_exponential_closeness(const SymbolPath& g, const SymbolPath& g_plus,
                                                             const SymbolPath& g_minus,
                                                             const ClosenessOptions& opts = {});

}  // namespace ndattr
