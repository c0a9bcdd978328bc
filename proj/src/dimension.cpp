#include "ndattr/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ndattr/errors.hpp"
#include "ndattr/parallel.hpp"

namespace ndattr {

// ---------------------------------------------------------------------------
// Box counting

std::vector<double> geometric_radii(double r0, double ratio, std::size_t count) {
    if (!(r0 > 0.0) || !(ratio > 0.0 && ratio < 1.0)) {
        throw InvalidArgument("geometric_radii: need r0 > 0 and ratio in (0, 1)");
    }
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = r0 * std::pow(ratio, static_cast<double>(i));
    return out;
}

namespace {

std::vector<double> sorted_radii(std::span<const double> radii) {
    if (radii.size() < 2) throw InvalidArgument("estimate_box_dim: need at least two radii");
    std::vector<double> r(radii.begin(), radii.end());
    for (double v : r) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("estimate_box_dim: radii must be positive");
    }
    std::sort(r.begin(), r.end(), std::greater<>());
    if (std::adjacent_find(r.begin(), r.end()) != r.end()) throw InvalidArgument("estimate_box_dim: repeated radius");
    return r;
}

void fit_slope(DimensionReport& rep, const FitWindow& window) {
    const std::size_t n = rep.radii.size();
    const std::size_t first = std::min(window.first, n - 1);
    const std::size_t last = std::min(window.last, n - 1);
    if (last < first + 1) throw InvalidArgument("estimate_box_dim: fit window needs at least two radii");
    rep.window_first = first;
    rep.window_last = last;
    std::vector<double> x, y;
    for (std::size_t i = first; i <= last; ++i) {
        x.push_back(-std::log(rep.radii[i]));
        y.push_back(std::log(static_cast<double>(rep.counts[i])));
    }
    const auto m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (intercept + slope * x[i]);
        rss += e * e;
    }
    rep.slope = std::max(0.0, slope);
    rep.intercept = intercept;
    rep.ci = x.size() > 2 ? 1.96 * std::sqrt(rss / (m - 2.0) / sxx) : 0.0;
}

DimensionReport finish(std::vector<double> radii, std::vector<std::size_t> counts, const FitWindow& window) {
    DimensionReport rep;
    rep.radii = std::move(radii);
    rep.counts = std::move(counts);
    for (std::size_t i = rep.counts.size() - 1; i-- > 0;) rep.counts[i] = std::min(rep.counts[i], rep.counts[i + 1]);
    rep.note = "greedy feasible covers; counts monotonized over finer radii";
    fit_slope(rep, window);
    return rep;
}

// Distances to a few pivot paths give the lower bound
// |d(i, p) - d(c, p)| <= d(i, c), which rejects most far pairs before the
// full series is evaluated.
class PrunedFrechet {
public:
    PrunedFrechet(const std::vector<SymbolPath>& paths, const FrechetConfig& cfg) : paths_(paths), cfg_(cfg) {
        const std::size_t n = paths.size();
        pivots_ = std::min<std::size_t>(kPivots, n);
        table_.assign(n * pivots_, 0.0);
        parallel_for(n, [&](std::size_t i) {
            for (std::size_t p = 0; p < pivots_; ++p) {
                table_[i * pivots_ + p] = frechet_dist(paths[i], paths[pivot_index(p)], cfg);
            }
        });
    }

    bool operator()(std::size_t i, std::size_t c, double r) const {
        const double limit = r * (1.0 + kCoverSlack) + 1e-12;
        const double* a = table_.data() + i * pivots_;
        const double* b = table_.data() + c * pivots_;
        for (std::size_t p = 0; p < pivots_; ++p) {
            if (std::abs(a[p] - b[p]) > limit) return false;
        }
        return frechet_within(paths_[i], paths_[c], r, cfg_);
    }

private:
    static constexpr std::size_t kPivots = 12;
    [[nodiscard]] std::size_t pivot_index(std::size_t p) const {
        return (p * (paths_.size() - 1)) / std::max<std::size_t>(1, pivots_ - 1);
    }

    const std::vector<SymbolPath>& paths_;
    FrechetConfig cfg_;
    std::size_t pivots_ = 0;
    std::vector<double> table_;
};

}  // namespace

DimensionReport estimate_box_dim(std::size_t n, const std::function<bool(std::size_t, std::size_t, double)>& within,
                                 std::span<const double> radii, const FitWindow& window) {
    if (n == 0) throw InvalidArgument("estimate_box_dim: empty sample");
    auto r = sorted_radii(radii);
    if (n == 1) {
        DimensionReport rep;
        rep.radii = r;
        rep.counts.assign(r.size(), 1);
        rep.degenerate = true;
        rep.window_last = r.size() - 1;
        rep.note = "single point: dimension 0, no fit";
        return rep;
    }
    std::vector<std::size_t> counts(r.size());
    parallel_for(r.size(), [&](std::size_t i) { counts[i] = greedy_cover_indices(n, r[i], within).size(); });
    return finish(std::move(r), std::move(counts), window);
}

DimensionReport estimate_box_dim(const PointCloud& k, std::span<const double> radii, const FitWindow& window) {
    if (k.empty()) throw InvalidArgument("estimate_box_dim: empty cloud");
    (void)k.modes();
    const bool coincide = std::all_of(k.elements.begin(), k.elements.end(),
                                      [&](const StateVector& p) { return p == k.elements.front(); });
    if (coincide) {
        auto rep = estimate_box_dim(1, [](std::size_t, std::size_t, double) { return true; }, radii, window);
        rep.note = "all points coincide: dimension 0, no fit";
        return rep;
    }
    auto r = sorted_radii(radii);
    std::vector<std::size_t> counts(r.size());
    parallel_for(r.size(), [&](std::size_t i) { counts[i] = greedy_cover_count(k, r[i]); });
    return finish(std::move(r), std::move(counts), window);
}

DimensionReport estimate_box_dim(const HullApproximation& hull, std::span<const double> radii,
                                 const FitWindow& window) {
    if (hull.paths.empty()) throw InvalidArgument("estimate_box_dim: empty hull");
    const PrunedFrechet within(hull.paths, hull.metric);
    return estimate_box_dim(hull.paths.size(), std::cref(within), radii, window);
}

// ---------------------------------------------------------------------------
// Exponential attractor

double skew_distance(const SkewState& a, const SkewState& b, const FrechetConfig& metric) {
    return distance_x(a.x, b.x) + frechet_dist(a.sigma, b.sigma, metric);
}

PointCloud ExpAttractorBuild::states() const {
    PointCloud out;
    out.label = "M_d";
    for (const auto& s : discrete) out.elements.push_back(s.x);
    return out;
}

std::uint64_t smoothing_cover_number(const SpatialDiscretization& disc, double nu, double kappa) {
    if (!(nu > 0.0 && nu < 1.0)) throw InvalidArgument("smoothing_cover_number: nu must lie in (0, 1)");
    if (!(kappa > 0.0)) return 1;
    return unit_ball_Y_cover_count(disc, nu / (2.0 * kappa));
}

namespace {

void validate(const ExpAttractorOptions& o) {
    if (!(o.nu > 0.0 && o.nu < 1.0)) throw InvalidArgument("exp attractor: nu must lie in (0, 1)");
    if (!(o.R > 0.0)) throw InvalidArgument("exp attractor: R must be positive");
    if (!(o.tau > 0.0)) throw InvalidArgument("exp attractor: tau must be positive");
    if (o.n_max < 0) throw InvalidArgument("exp attractor: n_max must be non-negative");
    if (!(o.P >= 1.0) || !(o.zeta >= 0.0) || !(o.c1 > 0.0) || !(o.beta >= 0.0)) {
        throw InvalidArgument("exp attractor: invalid symbol-Lipschitz constants");
    }
}

SkewState skew_step(const Process& process, const SkewState& s, double t) {
    return {process.evolve(s.x, s.sigma, 0.0, t), s.sigma.shifted(t)};
}

double power(double base, int n) { return std::pow(base, static_cast<double>(n)); }

}  // namespace

ExpAttractorBuild build_discrete_exp_attractor(const Process& process, const PointCloud& b,
                                               const HullApproximation& hull, const ExpAttractorOptions& opts) {
    validate(opts);
    if (b.empty()) throw InvalidArgument("exp attractor: empty absorbing sample");
    if (hull.paths.empty()) throw InvalidArgument("exp attractor: empty hull");
    ExpAttractorBuild build;
    build.options = opts;
    build.metric = hull.metric;
    build.N_nu = smoothing_cover_number(process.config().disc, opts.nu, opts.kappa);
    const double tau = opts.tau;
    const PrunedFrechet symbol_within(hull.paths, hull.metric);

    for (int n = 0; n <= opts.n_max; ++n) {
        ExpAttractorLevel level;
        level.n = n;
        const double nt = n * tau;
        const double lip = opts.c1 * std::exp(opts.beta * nt);
        level.state_radius = opts.R * power(opts.nu, n);
        level.symbol_radius = level.state_radius / (opts.P * std::exp(opts.zeta * nt) * lip);
        level.symbol_centers = greedy_cover_indices(hull.paths.size(), level.symbol_radius, std::cref(symbol_within));
        const std::size_t n_centers = level.symbol_centers.size();
        std::vector<std::vector<StateVector>> centers(n_centers);
        parallel_for(n_centers, [&](std::size_t ci) {
            const auto& sigma = hull.paths[level.symbol_centers[ci]];
            PointCloud image;
            image.elements.reserve(b.size());
            for (const auto& x : b.elements) image.elements.push_back(process.evolve(x, sigma, 0.0, nt));
            centers[ci] = greedy_cover(image, level.state_radius).centers;
        });
        std::vector<SkewState> lifted;
        const double limit = power(static_cast<double>(build.N_nu), n);
        for (std::size_t ci = 0; ci < n_centers; ++ci) {
            level.image_counts.push_back(centers[ci].size());
            if (n >= 1 && static_cast<double>(centers[ci].size()) > limit) level.induction_holds = false;
            const SymbolPath shifted = hull.paths[level.symbol_centers[ci]].shifted(nt);
            for (auto& x : centers[ci]) lifted.push_back({std::move(x), shifted});
        }
        level.lifted = lifted.size();

        std::vector<SkewState> acc;
        if (n == 0) {
            acc = lifted;
        } else {
            const auto& prev = build.accumulated.back();
            acc.resize(prev.size());
            parallel_for(prev.size(), [&](std::size_t i) { acc[i] = skew_step(process, prev[i], tau); });
            acc.insert(acc.end(), lifted.begin(), lifted.end());
        }
        level.accumulated = acc.size();
        if (n >= 1) {
            std::size_t total = 0;
            for (const auto& e : build.accumulated) total += e.size();
            level.union_size = total;
            level.cardinality_limit = 0.5 * n * (n + 1) * static_cast<double>(n_centers) * limit;
            if (static_cast<double>(total) > level.cardinality_limit) build.cardinality_holds = false;
        }
        if (!level.induction_holds) build.induction_holds = false;
        build.lifted.push_back(std::move(lifted));
        build.accumulated.push_back(std::move(acc));
        build.levels.push_back(std::move(level));
    }
    for (const auto& e : build.accumulated) build.discrete.insert(build.discrete.end(), e.begin(), e.end());
    return build;
}

AttractionReport check_exponential_attraction(const Process& process, const ExpAttractorBuild& build,
                                              const PointCloud& b, std::span<const SymbolPath> symbols) {
    if (b.empty() || symbols.empty()) throw InvalidArgument("exponential attraction: empty probe set");
    if (build.discrete.empty()) throw InvalidArgument("exponential attraction: empty build");
    const auto& o = build.options;
    std::vector<SkewState> probes;
    for (const auto& sigma : symbols) {
        for (const auto& x : b.elements) probes.push_back({x, sigma});
    }
    AttractionReport rep;
    std::vector<double> dist(probes.size());
    for (int n = 1; n <= o.n_max; ++n) {
        parallel_for(probes.size(), [&](std::size_t i) {
            probes[i] = skew_step(process, probes[i], o.tau);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& m : build.discrete) {
                const double dx = distance_x(probes[i].x, m.x);
                if (dx >= best) continue;
                best = std::min(best, dx + frechet_dist(probes[i].sigma, m.sigma, build.metric));
                if (best == 0.0) break;
            }
            dist[i] = best;
        });
        const double measured = *std::max_element(dist.begin(), dist.end());
        const double envelope = 6.0 * o.R * power(o.nu, n);
        rep.levels.push_back(n);
        rep.measured.push_back(measured);
        rep.envelope.push_back(envelope);
        if (rep.measured.size() >= 2) {
            const double prev = rep.measured[rep.measured.size() - 2];
            rep.ratios.push_back(prev > 0.0 ? measured / prev : 0.0);
        }
        if (measured > envelope * (1.0 + kCoverSlack)) rep.pass = false;
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        if (rep.measured[i] > 0.0) {
            x.push_back(rep.levels[i] * o.tau);
            y.push_back(std::log(rep.measured[i]));
        }
    }
    if (x.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= static_cast<double>(x.size());
        my /= static_cast<double>(x.size());
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
        rep.fitted_rate = -sxy / sxx;
    }
    return rep;
}

PointCloud extend_continuous_attractor(const Process& process, const ExpAttractorBuild& build, double step) {
    if (!(step > 0.0)) throw InvalidArgument("continuous extension: step must be positive");
    const double tau = build.options.tau;
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(tau / step - 1e-9)));
    const std::size_t n = build.discrete.size();
    PointCloud out;
    out.label = "M";
    out.elements.resize(n * (pieces + 1));
    parallel_for(n, [&](std::size_t i) {
        const auto& s = build.discrete[i];
        StateVector x = s.x;
        out.elements[i * (pieces + 1)] = x;
        double now = 0.0;
        for (std::size_t j = 1; j <= pieces; ++j) {
            const double t = tau * static_cast<double>(j) / static_cast<double>(pieces);
            x = process.evolve(x, s.sigma, now, t);
            now = t;
            out.elements[i * (pieces + 1) + j] = x;
        }
    });
    return out;
}

CoveringInductionReport check_covering_induction(const Process& process, const PointCloud& b,
                                                 std::span<const SymbolPath> symbols, double R, double nu,
                                                 double tau, double kappa, int levels) {
    if (b.empty() || symbols.empty()) throw InvalidArgument("covering induction: empty sample");
    if (!(R > 0.0) || !(tau > 0.0) || levels < 1) throw InvalidArgument("covering induction: invalid parameters");
    CoveringInductionReport rep;
    rep.N_nu = smoothing_cover_number(process.config().disc, nu, kappa);
    std::vector<std::vector<StateVector>> cur(symbols.size(), b.elements);
    for (int n = 1; n <= levels; ++n) {
        const double radius = R * power(nu, n);
        std::vector<std::size_t> counts(symbols.size());
        parallel_for(symbols.size(), [&](std::size_t si) {
            PointCloud image;
            for (auto& x : cur[si]) {
                x = process.evolve(x, symbols[si], (n - 1) * tau, n * tau);
                image.elements.push_back(x);
            }
            counts[si] = greedy_cover_count(image, radius);
        });
        const std::size_t worst = *std::max_element(counts.begin(), counts.end());
        const double limit = power(static_cast<double>(rep.N_nu), n);
        rep.counts.push_back(worst);
        rep.limits.push_back(limit);
        if (static_cast<double>(worst) > limit) rep.holds = false;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Closed-form bounds

namespace {

void require_exponent(double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in (0, 1]");
}

void require_cover(double n) {
    if (!(n >= 1.0) || !std::isfinite(n)) throw InvalidArgument("covering number must be >= 1");
}

void require_nonnegative(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be non-negative");
}

}  // namespace

double bound_union_pullback(double d_plus, double d_minus, DecayModel model, double r, double theta, double gamma,
                            double n_cover) {
    require_exponent(theta, "theta");
    require_exponent(gamma, "gamma");
    require_cover(n_cover);
    require_nonnegative(d_plus, "d_plus");
    require_nonnegative(d_minus, "d_minus");
    double core = 1.0 / theta + std::log2(n_cover) / gamma;
    if (model == DecayModel::Polynomial) {
        if (!(r > 0.0)) throw InvalidArgument("polynomial decay exponent must be positive");
        core += 1.0 / r;
    }
    return std::max({d_plus, d_minus, core});
}

double bound_uniform_attractor_dim(double theta, double gamma, double n_cover, double beta, double zeta, double tau,
                                   double dsigma_minus, double dsigma_plus) {
    require_exponent(theta, "theta");
    require_exponent(gamma, "gamma");
    require_cover(n_cover);
    require_nonnegative(beta, "beta");
    require_nonnegative(zeta, "zeta");
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    require_nonnegative(dsigma_minus, "dsigma_minus");
    require_nonnegative(dsigma_plus, "dsigma_plus");
    const double ds = std::max(dsigma_minus, dsigma_plus);
    return 1.0 / theta + std::log2(n_cover) / gamma + ((beta + zeta) * tau / std::numbers::ln2 + 1.0) * ds;
}

double bound_exp_attractor_dim(double nu, double theta, double gamma, double n_nu, double dsigma, double beta,
                               double zeta, double tau) {
    if (!(nu > 0.0 && nu < 1.0)) throw InvalidArgument("nu must lie in (0, 1)");
    require_exponent(theta, "theta");
    require_exponent(gamma, "gamma");
    require_cover(n_nu);
    require_nonnegative(dsigma, "dsigma");
    require_nonnegative(beta, "beta");
    require_nonnegative(zeta, "zeta");
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    const double lognu = -std::log(nu);
    return 1.0 / theta + (std::log(n_nu) / lognu + dsigma * ((beta + zeta) * tau / lognu + 1.0)) / gamma;
}

UnionSweepReport sweep_union_dimension(const AttractorFamily& family, const SemicontinuityFit& fit,
                                       const UnionBoundInputs& inputs) {
    if (fit.plus.times.empty() || fit.minus.times.empty()) {
        throw InvalidArgument("union sweep: semicontinuity fits missing for one side");
    }
    if (family.size() == 0) throw InvalidArgument("union sweep: empty family");
    UnionSweepReport rep;
    rep.dimension = estimate_box_dim(family.pooled(), inputs.radii, inputs.window);
    rep.a1_holds = fit.plus.a1_holds && fit.minus.a1_holds;
    if (!rep.a1_holds) {
        rep.model = "none";
    } else {
        auto is_exp = [](const DecayFit& f) { return f.preferred == "exp" || f.preferred == "exact"; };
        if (is_exp(fit.plus) && is_exp(fit.minus)) {
            rep.model = "exp";
            rep.bound = bound_union_pullback(inputs.d_plus, inputs.d_minus, DecayModel::Exponential, 0.0,
                                             inputs.theta, inputs.gamma, inputs.n_cover);
        } else {
            rep.model = "poly";
            rep.r = std::numeric_limits<double>::infinity();
            if (!is_exp(fit.plus)) rep.r = std::min(rep.r, fit.plus.r);
            if (!is_exp(fit.minus)) rep.r = std::min(rep.r, fit.minus.r);
            rep.bound = bound_union_pullback(inputs.d_plus, inputs.d_minus, DecayModel::Polynomial, rep.r,
                                             inputs.theta, inputs.gamma, inputs.n_cover);
        }
        rep.bound_claimed = true;
        rep.within_bound = rep.dimension.slope <= rep.bound;
    }
    for (int n = 1; n <= 3; ++n) {
        SnapshotCountCheck c;
        c.n = n;
        c.radius = inputs.R * power(inputs.nu, n);
        c.limit = power(inputs.n_cover, n);
        for (const auto& s : family.snapshots) c.max_count = std::max(c.max_count, greedy_cover_count(s, c.radius));
        c.holds = static_cast<double>(c.max_count) <= c.limit;
        if (!c.holds) rep.snapshot_counts_hold = false;
        rep.snapshot_counts.push_back(c);
    }
    return rep;
}

}  // namespace ndattr
