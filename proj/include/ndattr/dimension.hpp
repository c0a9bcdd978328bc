#pragma once

// Box-counting estimates from greedy covers, the finite-depth exponential
// attractor construction on the skew product, and the closed-form
// dimension bounds.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ndattr/attractors.hpp"
#include "ndattr/dynamics.hpp"
#include "ndattr/state_space.hpp"
#include "ndattr/symbol_space.hpp"

namespace ndattr {

/// Inclusive index range into the radii used by the slope fit.
struct FitWindow {
    std::size_t first = 0;
    std::size_t last = std::numeric_limits<std::size_t>::max();
};

struct DimensionReport {
    std::vector<double> radii;  // decreasing
    std::vector<std::size_t> counts;
    double slope = 0.0;
    double intercept = 0.0;
    double ci = 0.0;  // 95% half-width of the slope
    std::size_t window_first = 0;
    std::size_t window_last = 0;
    bool degenerate = false;
    std::string note;
};

/// r0, r0 q, r0 q^2, ... (count values).
[[nodiscard]] std::vector<double> geometric_radii(double r0, double ratio, std::size_t count);

/// Greedy counts per radius, made non-increasing in r by keeping the
/// smaller count of any finer cover (a cover at r is also one at r' > r),
/// then the least-squares slope of log N against -log r over the window.
[[nodiscard]] DimensionReport estimate_box_dim(const PointCloud& k, std::span<const double> radii,
                                               const FitWindow& window = {});

/// Same on an abstract metric sample of n items.
[[nodiscard]] DimensionReport estimate_box_dim(std::size_t n,
                                               const std::function<bool(std::size_t, std::size_t, double)>& within,
                                               std::span<const double> radii, const FitWindow& window = {});

/// Hull samples under the truncated Frechet metric.
[[nodiscard]] DimensionReport estimate_box_dim(const HullApproximation& hull, std::span<const double> radii,
                                               const FitWindow& window = {});

/// A point of the skew product X x Sigma.
struct SkewState {
    StateVector x;
    SymbolPath sigma;
};

/// |x - y|_X + d(sigma, sigma').
[[nodiscard]] double skew_distance(const SkewState& a, const SkewState& b, const FrechetConfig& metric);

struct ExpAttractorOptions {
    double nu = 0.5;
    double R = 0.0;    // absorbing radius
    double tau = 0.0;  // absorbing time
    int n_max = 3;
    double P = 2.0;
    double zeta = 0.6931471805599453;
    /// Symbol-Lipschitz envelope L(t) = c1 e^{beta t}.
    double c1 = 1.0;
    double beta = 0.0;
    /// Smoothing constant kappa(tau); fixes N_{nu / 2 kappa} for bookkeeping.
    double kappa = 0.0;
};

struct ExpAttractorLevel {
    int n = 0;
    double symbol_radius = 0.0;  // R_n = R nu^n / (P e^{zeta n tau} L(n tau))
    double state_radius = 0.0;   // R nu^n
    std::vector<std::size_t> symbol_centers;  // hull indices
    std::vector<std::size_t> image_counts;    // greedy count per symbol center
    std::size_t lifted = 0;                   // |U(n)|
    std::size_t accumulated = 0;              // |E(n)|
    double cardinality_limit = 0.0;           // n(n+1)/2 N(n) N_nu^n
    std::size_t union_size = 0;               // |E(0) u ... u E(n-1)|
    bool induction_holds = true;              // every image count <= N_nu^n
};

struct ExpAttractorBuild {
    ExpAttractorOptions options;
    FrechetConfig metric;
    std::uint64_t N_nu = 1;  // covering number of the Y unit ball at nu / (2 kappa)
    std::vector<ExpAttractorLevel> levels;
    std::vector<std::vector<SkewState>> lifted;       // U(n)
    std::vector<std::vector<SkewState>> accumulated;  // E(k)
    std::vector<SkewState> discrete;                  // M_d
    bool induction_holds = true;
    bool cardinality_holds = true;

    /// State components of M_d.
    [[nodiscard]] PointCloud states() const;
};

/// Runs the level-by-level construction up to n_max: cover the hull at R_n,
/// cover each U_{sigma_i}(n tau, 0) B at R nu^n with centers drawn from the
/// image, lift to skew states, accumulate E(k+1) = S(tau) E(k) u U(k+1).
[[nodiscard]] ExpAttractorBuild build_discrete_exp_attractor(const Process& process, const PointCloud& b,
                                                             const HullApproximation& hull,
                                                             const ExpAttractorOptions& opts);

struct AttractionReport {
    std::vector<int> levels;
    std::vector<double> measured;  // dist_H(S(n tau) B, M_d)
    std::vector<double> envelope;  // 6 R nu^n
    std::vector<double> ratios;    // measured[n] / measured[n-1]
    double fitted_rate = 0.0;      // continuous rate from log measured vs n tau
    bool pass = true;
};

/// Probes are B x symbols, evolved on the skew product.
[[nodiscard]] AttractionReport check_exponential_attraction(const Process& process, const ExpAttractorBuild& build,
                                                            const PointCloud& b,
                                                            std::span<const SymbolPath> symbols);

/// Union of S(t) M_d over t = 0, step', 2 step', ..., tau, with step' the
/// largest divisor of tau not above step. Returns state components.
[[nodiscard]] PointCloud extend_continuous_attractor(const Process& process, const ExpAttractorBuild& build,
                                                     double step);

struct CoveringInductionReport {
    std::uint64_t N_nu = 1;
    std::vector<std::size_t> counts;  // greedy N(evolve(B, sigma, 0, n tau), R nu^n), max over symbols
    std::vector<double> limits;       // N_nu^n
    bool holds = true;
};

[[nodiscard]] CoveringInductionReport check_covering_induction(const Process& process, const PointCloud& b,
                                                               std::span<const SymbolPath> symbols, double R,
                                                               double nu, double tau, double kappa, int levels);

/// N_{nu / 2 kappa}: X-balls needed for the Y unit ball; 1 when kappa = 0.
[[nodiscard]] std::uint64_t smoothing_cover_number(const SpatialDiscretization& disc, double nu, double kappa);

enum class DecayModel { Polynomial, Exponential };

/// Polynomial: max(d+, d-, 1/r + 1/theta + log2 N / gamma).
/// Exponential: max(d+, d-, 1/theta + log2 N / gamma); r is ignored.
[[nodiscard]] double bound_union_pullback(double d_plus, double d_minus, DecayModel model, double r, double theta,
                                          double gamma, double n_cover);

/// 1/theta + log2 N / gamma + ((beta + zeta) tau / ln 2 + 1) max(dS-, dS+).
[[nodiscard]] double bound_uniform_attractor_dim(double theta, double gamma, double n_cover, double beta, double zeta,
                                                 double tau, double dsigma_minus, double dsigma_plus);

/// 1/theta + (1/gamma) [ln N / (-ln nu) + dS ((beta + zeta) tau / (-ln nu) + 1)].
[[nodiscard]] double bound_exp_attractor_dim(double nu, double theta, double gamma, double n_nu, double dsigma,
                                             double beta, double zeta, double tau);

struct UnionBoundInputs {
    double d_plus = 0.0;
    double d_minus = 0.0;
    double theta = 1.0;
    double gamma = 1.0;
    double n_cover = 1.0;
    double R = 1.0;
    double nu = 0.5;
    std::vector<double> radii;
    FitWindow window;
};

struct SnapshotCountCheck {
    int n = 0;
    double radius = 0.0;
    std::size_t max_count = 0;  // over snapshots
    double limit = 0.0;         // N^n
    bool holds = true;
};

struct UnionSweepReport {
    DimensionReport dimension;
    bool a1_holds = false;
    std::string model;  // "exp", "poly" or "none"
    double r = 0.0;
    bool bound_claimed = false;
    double bound = 0.0;
    bool within_bound = false;
    std::vector<SnapshotCountCheck> snapshot_counts;
    bool snapshot_counts_hold = true;
};

/// Dimension of the pooled cloud of all snapshots against the union bound
/// chosen by the fitted tail model. No bound is claimed when either tail
/// violates A1.
[[nodiscard]] UnionSweepReport sweep_union_dimension(const AttractorFamily& family, const SemicontinuityFit& fit,
                                                     const UnionBoundInputs& inputs);

}  // namespace ndattr
