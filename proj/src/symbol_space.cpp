#include "ndattr/symbol_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ndattr/errors.hpp"

namespace ndattr {

SymbolPath::SymbolPath(std::vector<double> times, const std::vector<StateVector>& values) {
    if (times.empty()) throw InvalidArgument("SymbolPath: no samples");
    if (times.size() != values.size()) throw InvalidArgument("SymbolPath: times/values size mismatch");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw InvalidArgument("SymbolPath: sample times must be strictly increasing");
    }
    auto s = std::make_shared<Samples>();
    s->modes = values.front().modes();
    if (s->modes == 0) throw InvalidArgument("SymbolPath: zero-mode values");
    s->values.reserve(times.size() * s->modes);
    for (const auto& v : values) {
        if (v.modes() != s->modes) throw InvalidArgument("SymbolPath: values must share mode_count");
        s->values.insert(s->values.end(), v.coefficients().begin(), v.coefficients().end());
    }
    if (times.size() >= 2) {
        const double step = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
        bool uniform = true;
        for (std::size_t i = 0; i < times.size() && uniform; ++i) {
            uniform = std::abs(times[i] - (times.front() + static_cast<double>(i) * step)) <= 1e-9 * step;
        }
        s->uniform = uniform;
        s->step = step;
    }
    s->times = std::move(times);
    data_ = std::move(s);
}

SymbolPath SymbolPath::constant(const StateVector& value) { return SymbolPath({0.0}, {value}); }

void SymbolPath::evaluate_into(double t, std::span<double> out) const {
    const Samples& s = *data_;
    const std::size_t m = s.modes;
    const double tau = t + offset_;
    const auto& ts = s.times;
    const std::size_t n = ts.size();
    if (n == 1 || tau <= ts.front()) {
        std::copy_n(s.values.begin(), m, out.begin());
        return;
    }
    if (tau >= ts.back()) {
        std::copy_n(s.values.begin() + static_cast<std::ptrdiff_t>((n - 1) * m), m, out.begin());
        return;
    }
    std::size_t i = 0;
    if (s.uniform) {
        const double guess = std::floor((tau - ts.front()) / s.step);
        i = static_cast<std::size_t>(std::clamp(guess, 0.0, static_cast<double>(n - 2)));
        while (i > 0 && ts[i] > tau) --i;
        while (i + 2 < n && ts[i + 1] <= tau) ++i;
    } else {
        i = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), tau) - ts.begin()) - 1;
    }
    const double w = (tau - ts[i]) / (ts[i + 1] - ts[i]);
    const double* a = s.values.data() + i * m;
    const double* b = a + m;
    if (w == 0.0) {
        std::copy_n(a, m, out.begin());
        return;
    }
    for (std::size_t k = 0; k < m; ++k) out[k] = a[k] + w * (b[k] - a[k]);
}

StateVector SymbolPath::operator()(double t) const {
    if (!data_) throw InvalidArgument("SymbolPath: evaluating an empty path");
    StateVector v(data_->modes);
    evaluate_into(t, v.coefficients());
    return v;
}

SymbolPath SymbolPath::shifted(double t) const {
    SymbolPath out = *this;
    out.offset_ = offset_ + t;
    return out;
}

std::vector<double> SymbolPath::breakpoints() const {
    std::vector<double> out;
    if (!data_) return out;
    out.reserve(data_->times.size());
    for (double t : data_->times) out.push_back(t - offset_);
    return out;
}

std::span<const double> SymbolPath::stored_times() const {
    if (!data_) return {};
    return data_->times;
}

StateVector SymbolPath::stored_value(std::size_t i) const {
    const std::size_t m = data_->modes;
    const auto first = data_->values.begin() + static_cast<std::ptrdiff_t>(i * m);
    return StateVector(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(m)));
}

SymbolPath shift(const SymbolPath& p, double t) { return p.shifted(t); }

namespace {

void require_compatible(const SymbolPath& p, const SymbolPath& q) {
    if (p.modes() == 0 || q.modes() == 0) throw InvalidArgument("Frechet metric: empty path");
    if (p.modes() != q.modes()) throw InvalidArgument("Frechet metric: mode-count mismatch");
}

// Evaluation points bucketed by the smallest window [-n, n] containing them.
std::vector<std::vector<double>> window_buckets(const SymbolPath& p, const SymbolPath& q, const FrechetConfig& cfg) {
    if (cfg.n_max < 0) throw InvalidArgument("Frechet metric: n_max must be >= 0");
    const int nmax = cfg.n_max;
    const double limit = static_cast<double>(nmax);
    std::vector<std::vector<double>> buckets(static_cast<std::size_t>(nmax) + 1);
    auto add = [&](double s) {
        if (s < -limit || s > limit) return;
        const double a = std::abs(s);
        auto b = static_cast<std::size_t>(std::ceil(a));
        buckets[std::min(b, buckets.size() - 1)].push_back(s);
    };
    for (const SymbolPath* path : {&p, &q}) {
        const auto times = path->stored_times();
        const double off = path->offset();
        auto lo = std::lower_bound(times.begin(), times.end(), -limit + off);
        auto hi = std::upper_bound(times.begin(), times.end(), limit + off);
        for (auto it = lo; it != hi; ++it) add(*it - off);
    }
    for (int n = -nmax; n <= nmax; ++n) add(static_cast<double>(n));
    if (cfg.samples_per_unit > 0) {
        const int per = cfg.samples_per_unit;
        for (long k = -static_cast<long>(nmax) * per; k <= static_cast<long>(nmax) * per; ++k) {
            if (k % per == 0) continue;  // integers already present
            add(static_cast<double>(k) / per);
        }
    }
    return buckets;
}

class DiffNorm {
public:
    DiffNorm(const SymbolPath& p, const SymbolPath& q) : p_(p), q_(q), a_(p.modes()), b_(p.modes()) {}
    double operator()(double s) {
        p_.evaluate_into(s, a_);
        q_.evaluate_into(s, b_);
        double acc = 0.0;
        for (std::size_t k = 0; k < a_.size(); ++k) {
            const double d = a_[k] - b_[k];
            acc += d * d;
        }
        return std::sqrt(acc);
    }

private:
    const SymbolPath& p_;
    const SymbolPath& q_;
    std::vector<double> a_, b_;
};

}  // namespace

std::vector<double> window_sup_distances(const SymbolPath& p, const SymbolPath& q, const FrechetConfig& cfg) {
    require_compatible(p, q);
    const auto buckets = window_buckets(p, q, cfg);
    DiffNorm diff(p, q);
    std::vector<double> out(buckets.size(), 0.0);
    double running = 0.0;
    for (std::size_t n = 0; n < buckets.size(); ++n) {
        for (double s : buckets[n]) running = std::max(running, diff(s));
        out[n] = running;
    }
    return out;
}

double frechet_dist(const SymbolPath& p, const SymbolPath& q, const FrechetConfig& cfg) {
    const auto windows = window_sup_distances(p, q, cfg);
    double sum = 0.0;
    double weight = 1.0;
    for (double d : windows) {
        sum += weight * d / (1.0 + d);
        weight *= 0.5;
    }
    return sum;
}

bool frechet_within(const SymbolPath& p, const SymbolPath& q, double r, const FrechetConfig& cfg) {
    require_compatible(p, q);
    const double limit = r * (1.0 + kCoverSlack);
    const auto buckets = window_buckets(p, q, cfg);
    DiffNorm diff(p, q);
    const double last_weight = std::ldexp(1.0, -cfg.n_max);
    double running = 0.0;
    double sum = 0.0;
    double weight = 1.0;
    for (std::size_t n = 0; n < buckets.size(); ++n) {
        for (double s : buckets[n]) running = std::max(running, diff(s));
        const double phi = running / (1.0 + running);
        sum += weight * phi;
        const double tail_weight = weight - last_weight;  // sum of remaining weights
        if (sum + phi * tail_weight > limit) return false;
        if (sum + tail_weight <= limit) return true;
        weight *= 0.5;
    }
    return sum <= limit;
}

double frechet_hausdorff(std::span<const SymbolPath> a, std::span<const SymbolPath> b, const FrechetConfig& cfg) {
    if (a.empty() || b.empty()) throw InvalidArgument("frechet_hausdorff: empty input");
    auto semi = [&](std::span<const SymbolPath> x, std::span<const SymbolPath> y) {
        double worst = 0.0;
        for (const auto& p : x) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& q : y) {
                nearest = std::min(nearest, frechet_dist(p, q, cfg));
                if (nearest <= worst) break;
            }
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(semi(a, b), semi(b, a));
}

DrivingLipschitz estimate_driving_lipschitz(const FrechetConfig& cfg, std::span<const SymbolPath> paths,
                                            std::vector<double> t_grid) {
    if (paths.size() < 2) throw InvalidArgument("estimate_driving_lipschitz: need at least two paths");
    if (t_grid.empty()) {
        for (int i = 0; i <= 20; ++i) t_grid.push_back(0.5 * i);
    }
    DrivingLipschitz out;
    out.P = 2.0;
    out.zeta = std::numbers::ln2;
    bool any_distinct = false;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t j = i + 1; j < paths.size(); ++j) {
            const double d0 = frechet_dist(paths[i], paths[j], cfg);
            if (d0 == 0.0) continue;
            any_distinct = true;
            ++out.pairs;
            for (double t : t_grid) {
                if (t < 0.0) throw InvalidArgument("estimate_driving_lipschitz: negative time");
                const double dt = frechet_dist(paths[i].shifted(t), paths[j].shifted(t), cfg);
                const double envelope = out.P * std::exp(out.zeta * t) * d0;
                out.max_growth = std::max(out.max_growth, dt / d0);
                out.worst_ratio = std::max(out.worst_ratio, dt / envelope);
            }
        }
    }
    if (!any_distinct) throw InvalidArgument("estimate_driving_lipschitz: degenerate sample (identical paths)");
    // Truncating the series at n_max can cost up to 2^(ceil t) 2^-n_max.
    out.holds = out.worst_ratio <= 1.0 + std::ldexp(1.0, 12 - cfg.n_max);
    return out;
}

HullApproximation build_hull(const SymbolPath& g, double extent, double resolution, const FrechetConfig& cfg) {
    if (!(extent > 0.0)) throw InvalidArgument("build_hull: extent must be positive");
    if (!(resolution > 0.0)) throw InvalidArgument("build_hull: resolution must be positive");
    HullApproximation h;
    h.source = g;
    h.metric = cfg;
    const auto steps = static_cast<std::size_t>(std::floor(2.0 * extent / resolution + 1e-9));
    h.shifts.reserve(steps + 1);
    h.paths.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double r = -extent + static_cast<double>(i) * resolution;
        h.shifts.push_back(r);
        h.paths.push_back(g.shifted(r));
    }
    return h;
}

HullApproximation estimate_limit_sets(const HullApproximation& h, Direction direction, const LimitSetOptions& opts) {
    if (h.paths.empty()) throw InvalidArgument("estimate_limit_sets: empty hull");
    if (!(opts.window_fraction > 0.0 && opts.window_fraction <= 0.5)) {
        throw InvalidArgument("estimate_limit_sets: window fraction must lie in (0, 1/2]");
    }
    double extent = 0.0;
    for (double r : h.shifts) extent = std::max(extent, std::abs(r));
    const double width = opts.window_fraction * extent;
    const double sign = direction == Direction::Forward ? 1.0 : -1.0;

    std::vector<SymbolPath> tail, inner;
    std::vector<double> tail_shifts;
    for (std::size_t i = 0; i < h.paths.size(); ++i) {
        const double depth = extent - sign * h.shifts[i];  // distance from the chosen end
        if (depth <= width + 1e-12) {
            tail.push_back(h.paths[i]);
            tail_shifts.push_back(h.shifts[i]);
        } else if (depth <= 2.0 * width + 1e-12) {
            inner.push_back(h.paths[i]);
        }
    }
    if (tail.empty() || inner.empty()) throw InvalidArgument("estimate_limit_sets: hull too coarse for the tail window");
    const double gap = frechet_hausdorff(tail, inner, h.metric);
    if (!(gap <= opts.tolerance)) {
        throw NonConvergenceError("estimate_limit_sets: tail windows differ by " + std::to_string(gap) +
                                  " (tolerance " + std::to_string(opts.tolerance) + ")");
    }
    HullApproximation out;
    out.source = h.source;
    out.metric = h.metric;
    out.shifts = std::move(tail_shifts);
    out.paths = std::move(tail);
    return out;
}

SymbolPath make_quasiperiodic(std::span<const double> frequencies, std::span<const StateVector> amplitudes,
                              double t_min, double t_max, double step) {
    if (frequencies.empty()) throw InvalidArgument("make_quasiperiodic: need at least one frequency");
    if (frequencies.size() != amplitudes.size()) throw InvalidArgument("make_quasiperiodic: one amplitude per frequency");
    if (!(t_max > t_min) || !(step > 0.0)) throw InvalidArgument("make_quasiperiodic: bad sampling grid");
    const std::size_t m = amplitudes.front().modes();
    const auto n = static_cast<std::size_t>(std::llround((t_max - t_min) / step));
    std::vector<double> times;
    std::vector<StateVector> values;
    times.reserve(n + 1);
    values.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = t_min + static_cast<double>(i) * step;
        StateVector v(m);
        for (std::size_t j = 0; j < frequencies.size(); ++j) {
            const double s = std::sin(frequencies[j] * t);
            for (std::size_t k = 0; k < m; ++k) v[k] += amplitudes[j][k] * s;
        }
        times.push_back(t);
        values.push_back(std::move(v));
    }
    return SymbolPath(std::move(times), values);
}

double cantor_address_point(std::size_t address, int depth) {
    double numerator = 0.0;
    for (int j = 0; j < depth; ++j) {
        const std::size_t bit = (address >> (depth - 1 - j)) & 1U;
        numerator = 3.0 * numerator + 2.0 * static_cast<double>(bit);
    }
    return numerator / std::pow(3.0, depth);
}

SymbolPath make_cantor_forcing(const CantorSampler& sampler, int depth) {
    if (depth < 1) throw InvalidArgument("make_cantor_forcing: depth must be >= 1");
    if (depth > 24) throw InvalidArgument("make_cantor_forcing: depth too large");
    const std::size_t leaves = std::size_t{1} << depth;
    const double cell = 1.0 / std::pow(3.0, depth);

    std::vector<StateVector> points;
    points.reserve(leaves);
    for (std::size_t a = 0; a < leaves; ++a) points.push_back(sampler(a));
    const std::size_t m = points.front().modes();
    for (const auto& p : points) {
        if (p.modes() != m) throw InvalidArgument("make_cantor_forcing: sampler points must share mode_count");
    }

    std::vector<double> times;
    std::vector<StateVector> values;
    times.reserve(2 * leaves + 2);
    values.reserve(2 * leaves + 2);
    times.push_back(-1.0);
    values.emplace_back(m);
    for (std::size_t a = 0; a < leaves; ++a) {
        const double left = cantor_address_point(a, depth);
        const double right = (a + 1 == leaves) ? 1.0 : left + cell;
        times.push_back(left);
        values.push_back(points[a]);
        times.push_back(right);
        values.push_back(points[a]);
    }
    times.push_back(2.0);
    values.emplace_back(m);
    return SymbolPath(std::move(times), values);
}

CantorSampler y_ball_indicator_sampler(const SpatialDiscretization& disc, int depth) {
    if (depth < 1) throw InvalidArgument("y_ball_indicator_sampler: depth must be >= 1");
    if (disc.modes() < static_cast<std::size_t>(depth)) {
        throw InvalidArgument("y_ball_indicator_sampler: need at least depth modes");
    }
    std::vector<double> scale(static_cast<std::size_t>(depth));
    for (int k = 0; k < depth; ++k) scale[static_cast<std::size_t>(k)] = 1.0 / std::sqrt(depth * disc.eigenvalue(static_cast<std::size_t>(k)));
    const std::size_t m = disc.modes();
    return [scale, depth, m](std::size_t address) {
        StateVector v(m);
        for (int k = 0; k < depth; ++k) {
            const std::size_t bit = (address >> (depth - 1 - k)) & 1U;
            v[static_cast<std::size_t>(k)] = bit ? scale[static_cast<std::size_t>(k)] : 0.0;
        }
        return v;
    };
}

double modulus_on_grid(const SymbolPath& p, double t0, double t1, double step) {
    if (!(t1 > t0) || !(step > 0.0)) throw InvalidArgument("modulus_on_grid: bad grid");
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
    double worst = 0.0;
    StateVector prev = p(t0);
    for (std::size_t i = 1; i <= n; ++i) {
        StateVector cur = p(t0 + static_cast<double>(i) * step);
        worst = std::max(worst, distance_x(cur, prev));
        prev = std::move(cur);
    }
    return worst;
}

namespace {

struct SideFit {
    double Q = 1.0;
    double rate = 1.0;
    bool compact = false;
};

// Envelope err(t) <= Q exp(-rate |t|) over samples at |t| = i * step.
SideFit fit_side(const SymbolPath& g, const SymbolPath& ref, double sign, const ClosenessOptions& opts,
                 const char* side) {
    const auto n = static_cast<std::size_t>(std::floor(opts.horizon / opts.step + 1e-9));
    std::vector<double> ts, errs;
    ts.reserve(n + 1);
    errs.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double a = static_cast<double>(i) * opts.step;
        ts.push_back(a);
        errs.push_back(distance_x(g(sign * a), ref(sign * a)));
    }
    SideFit out;
    std::size_t last_nonzero = n + 1;
    for (std::size_t i = 0; i <= n; ++i) {
        if (errs[i] > 0.0) last_nonzero = i;
    }
    if (last_nonzero == n + 1) {
        out.compact = true;
        out.Q = 1.0;
        out.rate = opts.default_rate;
        return out;
    }
    if (last_nonzero < n) {
        out.compact = true;
        out.rate = opts.default_rate;
    } else {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        std::size_t k = 0;
        for (std::size_t i = 0; i <= n; ++i) {
            if (!(errs[i] > 0.0)) continue;
            const double y = std::log(errs[i]);
            sx += ts[i];
            sy += y;
            sxx += ts[i] * ts[i];
            sxy += ts[i] * y;
            ++k;
        }
        const double denom = static_cast<double>(k) * sxx - sx * sx;
        if (k < 3 || denom <= 0.0) {
            throw NonConvergenceError(std::string("fit_exponential_closeness: too few samples on the ") + side + " side");
        }
        const double slope = (static_cast<double>(k) * sxy - sx * sy) / denom;
        if (!(slope < 0.0)) {
            throw NonConvergenceError(std::string("fit_exponential_closeness: ") + side + " tail does not decay");
        }
        out.rate = -slope;
    }
    double q = 0.0;
    if (out.compact) {
        // Support ends before the first trailing zero sample; the envelope
        // has to hold at every time up to it, not only on the grid.
        double peak = 0.0;
        for (std::size_t i = 0; i <= last_nonzero; ++i) peak = std::max(peak, errs[i]);
        q = peak * std::exp(out.rate * ts[last_nonzero + 1]);
    } else {
        for (std::size_t i = 0; i <= n; ++i) q = std::max(q, errs[i] * std::exp(out.rate * ts[i]));
    }
    out.Q = q;
    return out;
}

}  // namespace

ExponentialCloseness fit_exponential_closeness(const SymbolPath& g, const SymbolPath& g_plus,
                                               const SymbolPath& g_minus, const ClosenessOptions& opts) {
    if (!(opts.horizon > 0.0) || !(opts.step > 0.0) || !(opts.default_rate > 0.0)) {
        throw InvalidArgument("fit_exponential_closeness: bad options");
    }
    require_compatible(g, g_plus);
    require_compatible(g, g_minus);
    const SideFit plus = fit_side(g, g_plus, +1.0, opts, "forward");
    const SideFit minus = fit_side(g, g_minus, -1.0, opts, "backward");
    ExponentialCloseness out;
    out.Q2 = plus.Q;
    out.eta2 = plus.rate;
    out.plus_compact = plus.compact;
    out.Q1 = minus.Q;
    out.eta1 = minus.rate;
    out.minus_compact = minus.compact;
    out.samples = 2 * (static_cast<std::size_t>(std::floor(opts.horizon / opts.step + 1e-9)) + 1);
    return out;
}

}  // namespace ndattr
