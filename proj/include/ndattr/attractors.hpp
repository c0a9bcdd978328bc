#pragma once

// Absorbing balls, pullback attractor snapshots by ensemble lookback
// doubling, uniform-attractor clouds and tail-rate fits of the distance
// from A(t) to the asymptotic attractors.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ndattr/dynamics.hpp"
#include "ndattr/state_space.hpp"
#include "ndattr/symbol_space.hpp"

namespace ndattr {

struct AbsorbingCheckpoint {
    double t = 0.0;
    double max_norm = 0.0;  // over all probes and symbols
};

struct AbsorbingReport {
    double R_absorb = 0.0;
    double tau_absorb = 0.0;
    std::vector<AbsorbingCheckpoint> evidence;  // sampled on [tau, 2 tau]
    std::size_t trajectories = 0;
};

struct AbsorbingOptions {
    /// Candidate absorption times, tried in increasing order. Empty means
    /// 2^-6, 2^-5, ..., 2^6.
    std::vector<double> trial_taus;
    std::size_t probe_count = 32;  // Halton points on top of the 2m axis points
    std::uint64_t seed = 0;
};

/// Smallest trial radius R (and smallest trial tau for it) such that every
/// sampled trajectory from B_X(0, R) under every hull symbol stays in
/// B_X(0, R) for t in [tau, 2 tau]. Throws NonConvergenceError when no
/// trial radius absorbs itself.
[[nodiscard]] AbsorbingReport find_absorbing(const Process& process, const HullApproximation& hull,
                                             std::span<const double> trial_radii,
                                             const AbsorbingOptions& opts = {});

/// Probe set of the absorbing ball: axis points and Halton points.
[[nodiscard]] PointCloud absorbing_sample(std::size_t modes, const AbsorbingReport& absorb, std::size_t count,
                                          std::uint64_t seed);

struct PullbackOptions {
    std::size_t ensemble = 16;
    double initial_lookback = 1.0;
    double max_lookback = 1024.0;
    double tolerance = 1e-6;
    std::uint64_t seed = 0;
};

struct PullbackResult {
    PointCloud cloud;
    double lookback = 0.0;
    std::vector<double> lookbacks;  // schedule actually run
    std::vector<double> residuals;  // Hausdorff distance to the previous snapshot
};

/// Evolves the ensemble from t - T to t, doubling T until successive
/// snapshots agree to the tolerance. Throws NonConvergenceError past
/// max_lookback.
[[nodiscard]] PullbackResult compute_pullback_attractor(const Process& process, const SymbolPath& g, double t,
                                                        const AbsorbingReport& absorb,
                                                        const PullbackOptions& opts = {});

/// A(t) on a grid of times.
struct AttractorFamily {
    std::vector<double> times;
    std::vector<PointCloud> snapshots;
    std::vector<double> lookbacks;
    double tolerance = 0.0;
    std::size_t ensemble = 0;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] PointCloud pooled() const;
};

[[nodiscard]] AttractorFamily compute_pullback_family(const Process& process, const SymbolPath& g,
                                                      std::span<const double> times, const AbsorbingReport& absorb,
                                                      const PullbackOptions& opts = {});

/// Builds a family from precomputed clouds (synthetic data, reloaded runs).
[[nodiscard]] AttractorFamily make_family(std::vector<double> times, std::vector<PointCloud> snapshots,
                                          double tolerance = 0.0);

/// max over adjacent grid times s < t of both semi-distances between
/// evolve(A(s), g, s, t) and A(t).
[[nodiscard]] double invariance_residual(const Process& process, const SymbolPath& g, const AttractorFamily& family);

/// hausdorff_semidist(evolve(B, g, t - T, t), A(t)) for each T in lookbacks.
[[nodiscard]] std::vector<double> pullback_attraction_profile(const Process& process, const SymbolPath& g, double t,
                                                              const PointCloud& b, const PointCloud& attractor,
                                                              std::span<const double> lookbacks);

struct UniformAttractor {
    PointCloud cloud;
    std::vector<PullbackResult> per_symbol;
};

/// Union over hull symbols of the pullback snapshot at t = 0.
[[nodiscard]] UniformAttractor compute_uniform_attractor(const Process& process, const HullApproximation& hull,
                                                         const AbsorbingReport& absorb,
                                                         const PullbackOptions& opts = {});

/// Exponential and power-law fits of one tail of distances.
struct DecayFit {
    std::vector<double> times;  // |t|
    std::vector<double> distances;
    double t_tilde = 0.0;       // start of the monotone tail used for the fits
    bool exact = false;         // every distance is zero
    bool monotone = false;      // non-increasing on [t_tilde, T]
    bool a1_holds = false;
    // d <= c_bar e^{-xi |t|}
    double c_bar = 0.0, xi = 0.0, exp_rss = 0.0;
    // d ~ K |t|^{-r}
    double K = 0.0, r = 0.0, poly_rss = 0.0;
    std::string preferred;      // "exp", "poly" or "none"
    double residual_ratio = 0.0;  // exp_rss / poly_rss
};

/// Fits both models on log d over the longest non-increasing tail with at
/// least three points and |t| >= T/2 coverage. Never throws on bad data:
/// a1_holds is false instead.
[[nodiscard]] DecayFit fit_decay_models(std::span<const double> times, std::span<const double> distances);

struct SemicontinuityFit {
    DecayFit plus;   // t >= 0 against M_plus
    DecayFit minus;  // t <= 0 against M_minus
};

[[nodiscard]] SemicontinuityFit fit_semicontinuity_rate(const AttractorFamily& family, const PointCloud& m_plus,
                                                        const PointCloud& m_minus);

/// Directory of per-time CSV clouds plus manifest.json.
void write_family(const AttractorFamily& family, const std::filesystem::path& dir);
[[nodiscard]] AttractorFamily read_family(const std::filesystem::path& dir);

}  // namespace ndattr
