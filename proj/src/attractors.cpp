#include "ndattr/attractors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "ndattr/errors.hpp"
#include "ndattr/io.hpp"
#include "ndattr/parallel.hpp"
#include "ndattr/sampling.hpp"

namespace ndattr {

// ---------------------------------------------------------------------------
// Absorbing balls

namespace {

std::vector<double> default_taus() {
    std::vector<double> out;
    for (int k = -6; k <= 6; ++k) out.push_back(std::ldexp(1.0, k));
    return out;
}

}  // namespace

PointCloud absorbing_sample(std::size_t modes, const AbsorbingReport& absorb, std::size_t count,
                            std::uint64_t seed) {
    PointCloud out;
    out.elements = ball_probe_points(modes, count, absorb.R_absorb, seed);
    out.label = "absorbing_sample";
    return out;
}

AbsorbingReport find_absorbing(const Process& process, const HullApproximation& hull,
                               std::span<const double> trial_radii, const AbsorbingOptions& opts) {
    if (hull.paths.empty()) throw InvalidArgument("find_absorbing: empty hull");
    if (trial_radii.empty()) throw InvalidArgument("find_absorbing: no trial radii");
    std::vector<double> radii(trial_radii.begin(), trial_radii.end());
    for (double r : radii) {
        if (!(r > 0.0)) throw InvalidArgument("find_absorbing: trial radii must be positive");
    }
    std::sort(radii.begin(), radii.end());
    std::vector<double> taus = opts.trial_taus.empty() ? default_taus() : opts.trial_taus;
    for (double t : taus) {
        if (!(t > 0.0)) throw InvalidArgument("find_absorbing: trial times must be positive");
    }
    std::sort(taus.begin(), taus.end());

    const std::size_t m = process.modes();
    const double h = process.h();
    const std::size_t n_sym = hull.paths.size();

    for (double radius : radii) {
        const auto starts = ball_probe_points(m, opts.probe_count, radius, opts.seed);
        const std::size_t n_traj = starts.size() * n_sym;
        std::vector<StateVector> states;
        states.reserve(n_traj);
        for (std::size_t j = 0; j < n_sym; ++j) states.insert(states.end(), starts.begin(), starts.end());
        std::vector<double> max_norm;  // per step index i, time i h
        double now = 0.0;

        auto extend_to = [&](double target) {
            if (target <= now) return;
            const std::size_t first = max_norm.size();
            std::vector<std::vector<double>> local(n_traj);
            parallel_for(n_traj, [&](std::size_t j) {
                const auto& sigma = hull.paths[j / starts.size()];
                process.evolve_observed(states[j], sigma, now, target,
                                        [&](double, const StateVector& u) { local[j].push_back(norm_x(u)); });
            });
            const std::size_t added = local.front().size();
            max_norm.resize(first + added, 0.0);
            for (const auto& l : local) {
                for (std::size_t i = 0; i < added; ++i) max_norm[first + i] = std::max(max_norm[first + i], l[i]);
            }
            now = target;
        };

        const double limit = radius * (1.0 + kCoverSlack);
        for (double tau : taus) {
            // Overflow means some trajectory left every ball for good, so no
            // later window at this radius can pass either.
            try {
                extend_to(2.0 * tau);
            } catch (const InstabilityError&) {
                break;
            }
            // max_norm[i] holds time (i + 1) h
            const auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(tau / h - 1e-9)));
            const auto hi = std::min(max_norm.size(), static_cast<std::size_t>(std::floor(2.0 * tau / h + 1e-9)));
            bool inside = hi >= lo;
            for (std::size_t i = lo; inside && i <= hi; ++i) inside = max_norm[i - 1] <= limit;
            if (!inside) continue;
            AbsorbingReport rep;
            rep.R_absorb = radius;
            rep.tau_absorb = tau;
            rep.trajectories = n_traj;
            for (int q = 0; q <= 4; ++q) {
                const double t = tau * (1.0 + 0.25 * q);
                auto i = static_cast<std::size_t>(std::llround(t / h));
                i = std::clamp<std::size_t>(i, lo, hi);
                rep.evidence.push_back({static_cast<double>(i) * h, max_norm[i - 1]});
            }
            return rep;
        }
    }
    throw NonConvergenceError("find_absorbing: no trial radius absorbs itself (non-dissipative configuration?)");
}

// ---------------------------------------------------------------------------
// Pullback snapshots

PullbackResult compute_pullback_attractor(const Process& process, const SymbolPath& g, double t,
                                          const AbsorbingReport& absorb, const PullbackOptions& opts) {
    if (opts.ensemble == 0) throw InvalidArgument("pullback: ensemble must be non-empty");
    if (!(opts.initial_lookback > 0.0) || !(opts.max_lookback >= opts.initial_lookback)) {
        throw InvalidArgument("pullback: invalid lookback schedule");
    }
    if (!(opts.tolerance > 0.0)) throw InvalidArgument("pullback: tolerance must be positive");
    if (!(absorb.R_absorb > 0.0)) throw InvalidArgument("pullback: absorbing radius must be positive");
    const std::size_t m = process.modes();
    const auto starts = halton_ball_points(m, opts.ensemble, absorb.R_absorb, opts.seed);

    auto snapshot = [&](double lookback) {
        PointCloud cloud;
        cloud.elements.resize(starts.size());
        parallel_for(starts.size(), [&](std::size_t i) {
            cloud.elements[i] = process.evolve(starts[i], g, t - lookback, t);
        });
        return cloud;
    };

    PullbackResult out;
    double lookback = opts.initial_lookback;
    PointCloud prev = snapshot(lookback);
    out.lookbacks.push_back(lookback);
    out.residuals.push_back(std::numeric_limits<double>::infinity());
    while (true) {
        const double next = 2.0 * lookback;
        if (next > opts.max_lookback * (1.0 + 1e-12)) {
            throw NonConvergenceError("pullback: no stabilization within lookback " +
                                      std::to_string(opts.max_lookback) + " at t = " + std::to_string(t));
        }
        PointCloud cur = snapshot(next);
        const double residual = hausdorff_dist(cur, prev);
        out.lookbacks.push_back(next);
        out.residuals.push_back(residual);
        lookback = next;
        if (residual < opts.tolerance) {
            out.cloud = std::move(cur);
            out.lookback = lookback;
            char label[64];
            std::snprintf(label, sizeof label, "A(%.17g)", t);
            out.cloud.label = label;
            return out;
        }
        prev = std::move(cur);
    }
}

PointCloud AttractorFamily::pooled() const {
    PointCloud out;
    out.label = "union";
    for (const auto& s : snapshots) out.elements.insert(out.elements.end(), s.elements.begin(), s.elements.end());
    return out;
}

AttractorFamily compute_pullback_family(const Process& process, const SymbolPath& g, std::span<const double> times,
                                        const AbsorbingReport& absorb, const PullbackOptions& opts) {
    if (times.empty()) throw InvalidArgument("pullback family: empty time grid");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw InvalidArgument("pullback family: times must increase");
    }
    AttractorFamily fam;
    fam.times.assign(times.begin(), times.end());
    fam.snapshots.resize(times.size());
    fam.lookbacks.resize(times.size());
    fam.tolerance = opts.tolerance;
    fam.ensemble = opts.ensemble;
    for (std::size_t i = 0; i < times.size(); ++i) {
        auto res = compute_pullback_attractor(process, g, times[i], absorb, opts);
        fam.snapshots[i] = std::move(res.cloud);
        fam.lookbacks[i] = res.lookback;
    }
    return fam;
}

AttractorFamily make_family(std::vector<double> times, std::vector<PointCloud> snapshots, double tolerance) {
    if (times.size() != snapshots.size() || times.empty()) {
        throw InvalidArgument("make_family: need one non-empty snapshot per time");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (snapshots[i].empty()) throw InvalidArgument("make_family: empty snapshot");
        if (i > 0 && !(times[i] > times[i - 1])) throw InvalidArgument("make_family: times must increase");
    }
    AttractorFamily fam;
    fam.ensemble = snapshots.front().size();
    fam.times = std::move(times);
    fam.snapshots = std::move(snapshots);
    fam.lookbacks.assign(fam.times.size(), 0.0);
    fam.tolerance = tolerance;
    return fam;
}

double invariance_residual(const Process& process, const SymbolPath& g, const AttractorFamily& family) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < family.size(); ++i) {
        PointCloud pushed;
        pushed.elements.resize(family.snapshots[i].size());
        parallel_for(pushed.elements.size(), [&](std::size_t j) {
            pushed.elements[j] = process.evolve(family.snapshots[i].elements[j], g, family.times[i], family.times[i + 1]);
        });
        worst = std::max(worst, hausdorff_dist(pushed, family.snapshots[i + 1]));
    }
    return worst;
}

std::vector<double> pullback_attraction_profile(const Process& process, const SymbolPath& g, double t,
                                                const PointCloud& b, const PointCloud& attractor,
                                                std::span<const double> lookbacks) {
    std::vector<double> out;
    for (double lookback : lookbacks) {
        PointCloud pushed;
        pushed.elements.resize(b.size());
        parallel_for(b.size(), [&](std::size_t j) {
            pushed.elements[j] = process.evolve(b.elements[j], g, t - lookback, t);
        });
        out.push_back(hausdorff_semidist(pushed, attractor));
    }
    return out;
}

UniformAttractor compute_uniform_attractor(const Process& process, const HullApproximation& hull,
                                           const AbsorbingReport& absorb, const PullbackOptions& opts) {
    if (hull.paths.empty()) throw InvalidArgument("uniform attractor: empty hull");
    UniformAttractor out;
    out.per_symbol.resize(hull.paths.size());
    for (std::size_t i = 0; i < hull.paths.size(); ++i) {
        out.per_symbol[i] = compute_pullback_attractor(process, hull.paths[i], 0.0, absorb, opts);
    }
    out.cloud.label = "uniform_attractor";
    for (const auto& r : out.per_symbol) {
        out.cloud.elements.insert(out.cloud.elements.end(), r.cloud.elements.begin(), r.cloud.elements.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tail fits

namespace {

struct LineFit {
    double intercept = 0.0, slope = 0.0, rss = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        f.rss += e * e;
    }
    return f;
}

}  // namespace

DecayFit fit_decay_models(std::span<const double> times, std::span<const double> distances) {
    if (times.size() != distances.size()) throw InvalidArgument("fit_decay_models: size mismatch");
    DecayFit fit;
    fit.preferred = "none";
    std::vector<std::size_t> order(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    for (std::size_t i : order) {
        fit.times.push_back(std::abs(times[i]));
        fit.distances.push_back(distances[i]);
    }
    if (fit.times.empty()) return fit;

    if (std::all_of(fit.distances.begin(), fit.distances.end(), [](double d) { return d == 0.0; })) {
        fit.exact = true;
        fit.monotone = true;
        fit.a1_holds = true;
        fit.preferred = "exact";
        return fit;
    }

    const std::size_t n = fit.times.size();
    std::size_t start = n - 1;
    while (start > 0 && fit.distances[start] <= fit.distances[start - 1] * (1.0 + 1e-9) + 1e-15) --start;
    fit.t_tilde = fit.times[start];
    const double horizon = fit.times.back();

    std::vector<double> t, lt, ld;
    for (std::size_t i = start; i < n; ++i) {
        if (fit.times[i] > 0.0 && fit.distances[i] > 0.0) {
            t.push_back(fit.times[i]);
            lt.push_back(std::log(fit.times[i]));
            ld.push_back(std::log(fit.distances[i]));
        }
    }
    fit.monotone = (n - start) >= 3;
    if (t.size() < 3) return fit;

    const LineFit e = least_squares(t, ld);
    fit.xi = -e.slope;
    fit.exp_rss = e.rss;
    fit.c_bar = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        fit.c_bar = std::max(fit.c_bar, fit.distances[i] * std::exp(fit.xi * fit.times[i]));
    }
    const LineFit p = least_squares(lt, ld);
    fit.r = -p.slope;
    fit.K = std::exp(p.intercept);
    fit.poly_rss = p.rss;
    fit.residual_ratio = p.rss > 0.0 ? e.rss / p.rss : (e.rss > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    fit.preferred = e.rss <= p.rss ? "exp" : "poly";
    const bool decays = fit.preferred == "exp" ? fit.xi > 0.0 : fit.r > 0.0;
    fit.a1_holds = fit.monotone && decays && fit.t_tilde <= 0.5 * horizon;
    return fit;
}

SemicontinuityFit fit_semicontinuity_rate(const AttractorFamily& family, const PointCloud& m_plus,
                                          const PointCloud& m_minus) {
    if (family.size() == 0) throw InvalidArgument("semicontinuity fit: empty family");
    if (m_plus.empty() || m_minus.empty()) throw InvalidArgument("semicontinuity fit: empty asymptotic attractor");
    std::vector<double> tp, dp, tm, dm;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const double t = family.times[i];
        if (t >= 0.0) {
            tp.push_back(t);
            dp.push_back(hausdorff_semidist(family.snapshots[i], m_plus));
        }
        if (t <= 0.0) {
            tm.push_back(-t);
            dm.push_back(hausdorff_semidist(family.snapshots[i], m_minus));
        }
    }
    return {fit_decay_models(tp, dp), fit_decay_models(tm, dm)};
}

// ---------------------------------------------------------------------------
// Serialization

void write_family(const AttractorFamily& family, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["times"] = family.times;
    manifest["lookbacks"] = family.lookbacks;
    manifest["tolerance"] = family.tolerance;
    manifest["ensemble"] = family.ensemble;
    std::vector<std::string> files;
    for (std::size_t i = 0; i < family.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "A_%04zu.csv", i);
        write_cloud_csv(family.snapshots[i], dir / name);
        files.emplace_back(name);
    }
    manifest["files"] = files;
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

AttractorFamily read_family(const std::filesystem::path& dir) {
    const auto manifest = nlohmann::json::parse(read_text(dir / "manifest.json"));
    AttractorFamily fam;
    fam.times = manifest.at("times").get<std::vector<double>>();
    fam.lookbacks = manifest.at("lookbacks").get<std::vector<double>>();
    fam.tolerance = manifest.at("tolerance").get<double>();
    fam.ensemble = manifest.at("ensemble").get<std::size_t>();
    for (const auto& f : manifest.at("files")) fam.snapshots.push_back(read_cloud_csv(dir / f.get<std::string>()));
    if (fam.snapshots.size() != fam.times.size()) throw InvalidArgument("family manifest: file count mismatch");
    return fam;
}

}  // namespace ndattr
